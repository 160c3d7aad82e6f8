"""Bijections of the latent cube and invertible linear maps on function space.

A cube bijection is stored as a permutation of the 2^d point indices; its
component functions are derived tables.  Basis transforms act on spectra:
either a permutation of the parity basis or a general invertible matrix
whose columns are the transformed-parity spectra.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .boolfn import (
    CapacityError,
    DegreeTolerance,
    FourierSpectrum,
    TruthTable,
    degree,
    flip_influence,
    popcounts,
    table_degree,
    wht,
)

MAX_FULL_ENUMERATION_DIM = 3
DEFAULT_SAMPLE_SIZE = 100_000
CONDITION_WARN = 1e12

__all__ = [
    "CubeBijection",
    "SignedPermutation",
    "BasisTransform",
    "compose_with",
    "is_degree_one",
    "is_degree_one_influence",
    "preserves_Fk",
    "deg_under_basis",
    "is_compatible",
    "enumerate_bijections",
    "sampled_bijections",
    "parity_compose_degrees",
]


class CubeBijection:
    """A bijection of {-1,+1}^d as a permutation of point indices."""

    __slots__ = ("d", "perm", "__dict__")

    def __init__(self, d: int, perm: Sequence[int]):
        perm = np.asarray(perm, dtype=np.int64)
        if perm.shape != (1 << d,):
            raise ValueError(f"expected a permutation of {1 << d} indices")
        counts = np.bincount(perm, minlength=1 << d)
        if np.any(counts != 1):
            raise ValueError("not a permutation of the point indices")
        perm = perm.copy()
        perm.flags.writeable = False
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, d: int) -> "CubeBijection":
        return cls(d, np.arange(1 << d))

    @classmethod
    def from_components(cls, tables: Sequence[TruthTable]) -> "CubeBijection":
        d = len(tables)
        if any(t.n != d for t in tables):
            raise ValueError("need d sign-valued tables on the d-cube")
        perm = np.zeros(1 << d, dtype=np.int64)
        for i, t in enumerate(tables):
            if not t.is_sign_valued():
                raise ValueError("components must be +1/-1 valued")
            perm |= (t.values < 0).astype(np.int64) << i
        return cls(d, perm)

    def component(self, i: int) -> TruthTable:
        """Output coordinate i as a function of the input point."""
        if not 1 <= i <= self.d:
            raise ValueError(f"component {i} out of range")
        return TruthTable(self.d, 1.0 - 2.0 * ((self.perm >> (i - 1)) & 1))

    @cached_property
    def components(self) -> tuple[TruthTable, ...]:
        return tuple(self.component(i) for i in range(1, self.d + 1))

    def inverse(self) -> "CubeBijection":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return CubeBijection(self.d, inv)

    def compose(self, other: "CubeBijection") -> "CubeBijection":
        """The bijection z -> self(other(z))."""
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        return CubeBijection(self.d, self.perm[other.perm])

    def __eq__(self, other):
        return (
            isinstance(other, CubeBijection)
            and self.d == other.d
            and np.array_equal(self.perm, other.perm)
        )

    def __hash__(self):
        return hash((self.d, self.perm.tobytes()))

    def __repr__(self):
        return f"CubeBijection(d={self.d})"

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "perm": self.perm.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "CubeBijection":
        data = json.loads(text)
        return cls(int(data["d"]), data["perm"])


@dataclass(frozen=True)
class SignedPermutation:
    """T(z)_i = signs[i] * z_{perm[i]} (0-based fields, 2^d * d! of them)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)):
            raise ValueError("perm must be a permutation of 0..d-1")
        if len(self.signs) != d or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1/-1 of length d")

    @property
    def d(self) -> int:
        return len(self.perm)

    def to_bijection(self) -> CubeBijection:
        d = self.d
        indices = np.arange(1 << d)
        out = np.zeros(1 << d, dtype=np.int64)
        for i in range(d):
            bits = (indices >> self.perm[i]) & 1
            if self.signs[i] == -1:
                bits = bits ^ 1
            out |= bits << i
        return CubeBijection(d, out)

    @classmethod
    def enumerate_all(cls, d: int) -> Iterator["SignedPermutation"]:
        for perm in itertools.permutations(range(d)):
            for signs in itertools.product((1, -1), repeat=d):
                yield cls(perm, signs)

    def to_json(self) -> str:
        return json.dumps({"perm": list(self.perm), "signs": list(self.signs)})

    @classmethod
    def from_json(cls, text: str) -> "SignedPermutation":
        data = json.loads(text)
        return cls(tuple(data["perm"]), tuple(data["signs"]))


def compose_with(h: TruthTable, T: CubeBijection) -> TruthTable:
    """(h o T)(z) = h(T(z)): a permutation of the table entries."""
    if h.n != T.d:
        raise ValueError(f"dimension mismatch: table n={h.n}, bijection d={T.d}")
    return TruthTable(h.n, h.values[T.perm])


def parity_compose_degrees(T: CubeBijection, tol: DegreeTolerance | None = None) -> np.ndarray:
    """deg(chi_S o T) for every mask S, computed exactly in integers."""
    d = T.d
    size = 1 << d
    hadamard = 1 - 2 * (popcounts(d)[np.arange(size)[:, None] & np.arange(size)[None, :]] & 1)
    # column S of composed holds the table of chi_S o T; an integer matmul
    # against the Hadamard matrix gives 2^d times the spectra, exactly
    composed = hadamard[T.perm, :]
    spectra = hadamard @ composed
    pc = popcounts(d)[np.arange(size)]
    degs = np.where(spectra != 0, pc[:, None], -1).max(axis=0)
    return np.maximum(degs, 0)


def is_degree_one(T: CubeBijection, tol: DegreeTolerance | None = None) -> bool:
    """True iff every component of the bijection has degree exactly 1."""
    return all(table_degree(c, tol) == 1 for c in T.components)


def is_degree_one_influence(T: CubeBijection, k: int = 1) -> bool:
    """Degree-1 test through the influence pattern of the components.

    For each input subset S of size k there must be exactly one output
    subset of size k that S can influence, with every other output immune
    to S; for bijections this characterizes coordinatewise sign maps.
    """
    d = T.d
    if not 1 <= k <= max(d - 1, 1):
        raise ValueError(f"need 1 <= k <= d-1, got k={k}")
    if d == 1:
        return table_degree(T.component(1)) == 1
    influenced = np.array(
        [[flip_influence(c, i) > 0 for i in range(1, d + 1)] for c in T.components]
    )  # influenced[j, i]: input i+1 moves output j+1
    for S in itertools.combinations(range(d), k):
        touched = [j for j in range(d) if any(influenced[j, i] for i in S)]
        if len(touched) != k:
            return False
    return True


def preserves_Fk(T: CubeBijection, k: int) -> bool:
    """True iff composition with T maps every parity of size <= k to degree <= k.

    Containment of the degree-<=k subspace under an invertible map implies
    equality, since the subspace is finite-dimensional and h -> h o T is a
    linear bijection of the full function space.
    """
    if not 1 <= k <= T.d:
        raise ValueError(f"need 1 <= k <= d, got k={k}")
    degs = parity_compose_degrees(T)
    masks = np.flatnonzero(popcounts(T.d)[np.arange(1 << T.d)] <= k)
    return bool(np.all(degs[masks] <= k))


class BasisTransform:
    """Invertible linear map on function space, stored in the parity basis.

    Either a permutation sigma of subset masks (U(chi_S) = chi_{sigma(S)}),
    or a general invertible matrix whose column S is the spectrum of
    U(chi_S).
    """

    __slots__ = ("m", "sigma", "matrix", "__dict__")

    def __init__(self, m: int, sigma: Sequence[int] | None = None, matrix=None):
        if (sigma is None) == (matrix is None):
            raise ValueError("provide exactly one of sigma or matrix")
        size = 1 << m
        if sigma is not None:
            sigma = np.asarray(sigma, dtype=np.int64)
            if sigma.shape != (size,) or np.any(np.bincount(sigma, minlength=size) != 1):
                raise ValueError(f"sigma must be a permutation of {size} masks")
            sigma = sigma.copy()
            sigma.flags.writeable = False
        else:
            matrix = np.asarray(matrix, dtype=np.float64)
            if matrix.shape != (size, size):
                raise ValueError(f"matrix must be {size}x{size}")
            cond = np.linalg.cond(matrix)
            if not np.isfinite(cond):
                raise np.linalg.LinAlgError("basis transform matrix is singular")
            if cond > CONDITION_WARN:
                import warnings

                warnings.warn(f"basis transform condition number {cond:.3g} exceeds {CONDITION_WARN:.0e}")
            matrix = matrix.copy()
            matrix.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, m: int) -> "BasisTransform":
        return cls(m, sigma=np.arange(1 << m))

    @classmethod
    def parity_swap(cls, m: int, pairs: Sequence[tuple[int, int]]) -> "BasisTransform":
        """The involution exchanging each pair of masks, fixing the rest."""
        sigma = np.arange(1 << m)
        for a, b in pairs:
            sigma[a], sigma[b] = sigma[b], sigma[a]
        return cls(m, sigma=sigma)

    @property
    def kind(self) -> str:
        return "parity_perm" if self.sigma is not None else "matrix"

    @cached_property
    def _inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def forward_parity_degrees(self, tol: DegreeTolerance | None = None) -> np.ndarray:
        """deg(U(chi_S)) for every mask S."""
        pc = popcounts(self.m)[np.arange(1 << self.m)]
        if self.sigma is not None:
            return pc[self.sigma]
        tol = tol or DegreeTolerance()
        return np.array(
            [degree(FourierSpectrum(self.m, self.matrix[:, S]), tol) for S in range(1 << self.m)]
        )

    def inverse_parity_degrees(self, tol: DegreeTolerance | None = None) -> np.ndarray:
        """deg(U^{-1}(chi_S)) for every mask S: the per-mask cost vector."""
        pc = popcounts(self.m)[np.arange(1 << self.m)]
        if self.sigma is not None:
            inv = np.empty_like(self.sigma)
            inv[self.sigma] = np.arange(len(self.sigma))
            return pc[inv]
        tol = tol or DegreeTolerance()
        inv = self._inverse_matrix
        return np.array(
            [degree(FourierSpectrum(self.m, inv[:, S]), tol) for S in range(1 << self.m)]
        )

    def to_json(self) -> str:
        if self.sigma is not None:
            return json.dumps({"kind": "parity_perm", "sigma": self.sigma.tolist()})
        return json.dumps({"kind": "matrix", "entries": self.matrix.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "BasisTransform":
        data = json.loads(text)
        if data["kind"] == "parity_perm":
            sigma = data["sigma"]
            m = int(math.log2(len(sigma)))
            return cls(m, sigma=sigma)
        entries = data["entries"]
        m = int(math.log2(len(entries)))
        return cls(m, matrix=entries)


def deg_under_basis(
    f: TruthTable, U: BasisTransform, tol: DegreeTolerance | None = None
) -> int:
    """Degree of f measured in the transformed basis: the worst cost, under
    U^{-1}, among the parities f actually uses."""
    if f.n != U.m:
        raise ValueError(f"dimension mismatch: table n={f.n}, transform m={U.m}")
    masks = wht(f).support_masks(tol)
    if masks.size == 0:
        return 0
    return int(U.inverse_parity_degrees(tol)[masks].max())


def is_compatible(U: BasisTransform, tol: DegreeTolerance | None = None) -> bool:
    """True iff U preserves the degree of every parity."""
    pc = popcounts(U.m)[np.arange(1 << U.m)]
    return bool(np.all(U.forward_parity_degrees(tol) == pc))


def enumerate_bijections(
    d: int,
    sample: int | None = None,
    seed: int | None = None,
    include_signed_permutations: bool = True,
) -> Iterator[CubeBijection]:
    """Stream bijections of the d-cube.

    d <= 3 streams all (2^d)! bijections in lexicographic order.  For
    d >= 4 full enumeration is refused; the stream then yields the signed
    permutation subgroup followed by `sample` seeded uniform shuffles.
    """
    if d <= MAX_FULL_ENUMERATION_DIM and sample is None:
        for perm in itertools.permutations(range(1 << d)):
            yield CubeBijection(d, perm)
        return
    if sample is None:
        raise CapacityError(
            f"full enumeration of ({1 << d})! bijections at d={d} is refused; "
            "pass a sample size"
        )
    if seed is None:
        raise ValueError("sampled enumeration requires a seed")
    if include_signed_permutations:
        for sp in SignedPermutation.enumerate_all(d):
            yield sp.to_bijection()
    rng = np.random.default_rng(seed)
    for _ in range(sample):
        yield CubeBijection(d, rng.permutation(1 << d))


def sampled_bijections(
    d: int, seed: int, sample: int = DEFAULT_SAMPLE_SIZE
) -> Iterator[CubeBijection]:
    """Signed-permutation subgroup plus `sample` seeded uniform shuffles."""
    return enumerate_bijections(d, sample=sample, seed=seed)
