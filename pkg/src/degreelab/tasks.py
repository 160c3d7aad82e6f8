"""Task families over a generation model and degree-mixture sampling.

Families are indexed by the latent-solution degree budget k: the parity
family holds every signed parity of at most k latent coordinates, and the
random-polynomial family draws real coefficients on those monomials.
Uniform sampling "over all degree-<=k functions" is not well defined on an
infinite set, so both surrogates are provided and selectable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .genmodel import GenerationModel
from .minsolve import SupportedTask, masks_up_to_degree

__all__ = [
    "ParityFamily",
    "RandomPolynomialFamily",
    "DegreeMixture",
    "sample_task",
    "sample_mixture_task",
    "enumerate_family",
    "family_size",
]


@dataclass(frozen=True)
class ParityFamily:
    """All tasks s * chi_S(psi^{-1}(x)) with |S| <= k and s in {-1,+1}.

    Constant tasks (S empty) are members at every k; they have degree 0 and
    never matter for argmins, but keep the family closed under negation.
    """

    model: GenerationModel
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.model.d:
            raise ValueError(f"need 0 <= k <= d, got k={self.k}")

    @property
    def masks(self) -> np.ndarray:
        return masks_up_to_degree(self.model.d, self.k)

    def size(self) -> int:
        return 2 * len(self.masks)

    def task(self, mask: int, sign: int) -> SupportedTask:
        labels = sign * self.model.chi_on_support(mask, latent=True)
        return SupportedTask(self.model, labels)


@dataclass(frozen=True)
class RandomPolynomialFamily:
    """Tasks with uniform [-1, 1] coefficients on latent monomials |S| <= k."""

    model: GenerationModel
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.model.d:
            raise ValueError(f"need 0 <= k <= d, got k={self.k}")


TaskFamily = ParityFamily | RandomPolynomialFamily


def family_size(family: TaskFamily) -> int:
    if isinstance(family, ParityFamily):
        return family.size()
    raise ValueError("random-polynomial families are not enumerable")


def sample_task(family: TaskFamily, rng: np.random.Generator) -> SupportedTask:
    """Draw one task; the latent solution has degree <= family.k."""
    if isinstance(family, ParityFamily):
        masks = family.masks
        mask = int(masks[rng.integers(len(masks))])
        sign = int(rng.choice([-1, 1]))
        return family.task(mask, sign)
    masks = masks_up_to_degree(family.model.d, family.k)
    coeffs = rng.uniform(-1.0, 1.0, size=len(masks))
    labels = np.zeros(family.model.support_size())
    for mask, c in zip(masks.tolist(), coeffs):
        labels = labels + c * family.model.chi_on_support(mask, latent=True)
    return SupportedTask(family.model, labels)


def enumerate_family(family: TaskFamily) -> list[SupportedTask]:
    """All signed parity tasks in canonical order: masks by (|S|, mask), sign
    +1 before -1.  Refused for random-polynomial families."""
    if not isinstance(family, ParityFamily):
        raise ValueError("only parity families are enumerable")
    out = []
    for mask in family.masks.tolist():
        for sign in (1, -1):
            out.append(family.task(mask, sign))
    return out


class DegreeMixture:
    """Probabilities p_1..p_d over latent-solution degrees.

    Entries are held as exact fractions so that objective averages stay
    rational.  Zero entries are accepted: the identifiability claim needs
    p_1 > 0, and the expected-failure checks exercise exactly that boundary.
    """

    __slots__ = ("probs",)

    def __init__(self, probs: Sequence):
        fracs = []
        for p in probs:
            if isinstance(p, Fraction):
                fracs.append(p)
            elif isinstance(p, int):
                fracs.append(Fraction(p))
            else:
                fracs.append(Fraction(str(p)))
        if not fracs:
            raise ValueError("mixture needs at least one entry")
        if any(p < 0 or p > 1 for p in fracs):
            raise ValueError("mixture entries must lie in [0, 1]")
        total = sum(fracs)
        if abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"mixture must sum to 1 within 1e-12, got {float(total)}")
        if total != 1:
            fracs = [p / total for p in fracs]
        object.__setattr__(self, "probs", tuple(fracs))

    def __setattr__(self, name, value):
        raise AttributeError("DegreeMixture is immutable")

    @property
    def d(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> Fraction:
        """Probability of degree k (1-based)."""
        return self.probs[k - 1]

    def as_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def __repr__(self):
        return f"DegreeMixture({[str(p) for p in self.probs]})"

    @classmethod
    def uniform(cls, d: int) -> "DegreeMixture":
        return cls([Fraction(1, d)] * d)

    @classmethod
    def parse(cls, text: str) -> "DegreeMixture":
        return cls([Fraction(part) if "/" in part else part for part in text.split(",")])

    def to_json(self) -> str:
        return json.dumps([str(p) for p in self.probs])


def sample_mixture_task(
    mixture: DegreeMixture,
    families: Sequence[TaskFamily],
    rng: np.random.Generator,
) -> tuple[int, SupportedTask]:
    """Draw a degree k from the mixture, then a task from the k-th family."""
    if len(families) != mixture.d:
        raise ValueError(
            f"need one family per degree 1..{mixture.d}, got {len(families)}"
        )
    for k, family in enumerate(families, start=1):
        if family.k != k:
            raise ValueError(f"family at position {k} has budget k={family.k}")
    k = int(rng.choice(np.arange(1, mixture.d + 1), p=mixture.as_floats()))
    return k, sample_task(families[k - 1], rng)
