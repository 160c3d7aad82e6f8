"""Exact degree-minimizing interpolation over restricted supports.

The solver finds the smallest k for which the linear system  A c = y  is
consistent, where A's columns are the parities chi_S evaluated on the
support points, over all |S| <= k.  Consistency is decided by the
least-squares residual against the threshold rtol * (1 + ||y||).  Among all
degree-k solutions the minimum-norm one is returned, together with the
residual trail that certifies no degree-(k-1) fit exists.

When the support covers the whole data cube the interpolant is unique and
the transform computes it directly; the generic path and the dense path
agree (cross-checked in the test suite) because the parity columns are
orthogonal on the full cube.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boolfn import (
    CapacityError,
    DegreeTolerance,
    FourierSpectrum,
    TruthTable,
    coords_to_mask,
    degree,
    multi_degree,
    popcounts,
    wht,
)
from .genmodel import GenerationModel

MAX_SOLVE_DIM = 16
DEFAULT_RESIDUAL_RTOL = 1e-8
CERTIFICATE_FLOOR = 1e-6

__all__ = [
    "MAX_SOLVE_DIM",
    "SupportedTask",
    "MinDegreeSolution",
    "Realization",
    "Representation",
    "min_degree_fit",
    "min_degree_solve",
    "hamming_extension",
    "realization_degree",
    "conditional_degree",
    "corollary_membership_check",
    "masks_up_to_degree",
    "parity_design_matrix",
]


def masks_up_to_degree(n: int, k: int) -> np.ndarray:
    """All subset masks with |S| <= k, sorted by (|S|, mask)."""
    pc = popcounts(n)
    masks = np.arange(1 << n)
    keep = masks[pc[masks] <= k]
    return keep[np.argsort(pc[keep], kind="stable")]


def parity_design_matrix(x_indices: np.ndarray, masks: np.ndarray, n: int) -> np.ndarray:
    """Matrix of chi_S(x) with one row per support point, one column per mask."""
    pc = popcounts(n)
    return 1.0 - 2.0 * (pc[np.bitwise_and(x_indices[:, None], masks[None, :])] & 1)


@dataclass(frozen=True)
class MinDegreeSolution:
    """A minimum-degree interpolant plus its infeasibility certificate.

    residual_by_degree[k] is the least-squares residual of the best
    degree-<=k fit; the entry at degree-1 below the solution degree is the
    certificate that no lower-degree solution exists.
    """

    spectrum: FourierSpectrum
    degree: int
    residual_by_degree: dict[int, float] = field(repr=False)

    def evaluate_indices(self, x_indices: np.ndarray) -> np.ndarray:
        masks = self.spectrum.support_masks(DegreeTolerance(0.0))
        if masks.size == 0:
            return np.zeros(len(x_indices))
        A = parity_design_matrix(np.asarray(x_indices), masks, self.spectrum.n)
        return A @ self.spectrum.coeffs[masks]

    @property
    def certificate_residual(self) -> float | None:
        """Residual of the infeasible system one degree below, if any."""
        if self.degree == 0:
            return None
        return self.residual_by_degree[self.degree - 1]

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "spectrum": {"n": self.spectrum.n, "coeffs": self.spectrum.coeffs.tolist()},
            "residual_by_degree": {str(k): v for k, v in sorted(self.residual_by_degree.items())},
            "monomials": self.spectrum.format_monomials(),
        }


def _full_cube_fit(x_indices, labels, m, rtol):
    """Unique interpolant on a complete cube, read off the transform."""
    table = np.empty(1 << m)
    table[x_indices] = labels
    coeffs = wht(TruthTable(m, table)).coeffs
    pc = popcounts(m)
    norm = float(np.linalg.norm(labels))
    # residual of the best degree-<=k fit: orthogonal columns make it the
    # two-norm of the dropped coefficients, scaled back to point space
    energy = np.zeros(m + 1)
    for k in range(m + 1):
        energy[k] = np.sum(coeffs[pc[np.arange(1 << m)] == k] ** 2)
    residuals = {}
    deg = 0
    for k in range(m + 1):
        tail = float(np.sqrt((1 << m) * np.sum(energy[k + 1 :])))
        residuals[k] = tail
        if tail <= rtol * (1.0 + norm):
            deg = k
            break
    keep = pc[np.arange(1 << m)] <= deg
    truncated = np.where(keep, coeffs, 0.0)
    return MinDegreeSolution(FourierSpectrum(m, truncated), deg, residuals)


def min_degree_fit(
    x_indices: Sequence[int],
    labels: Sequence[float],
    m: int,
    rtol: float = DEFAULT_RESIDUAL_RTOL,
) -> MinDegreeSolution:
    """Fit the minimum-degree parity expansion through the given points."""
    if m > MAX_SOLVE_DIM:
        raise CapacityError(f"solver handles data dimension <= {MAX_SOLVE_DIM}, got {m}")
    x_indices = np.asarray(x_indices, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.float64)
    if x_indices.shape != labels.shape:
        raise ValueError("one label per support point required")
    if not np.all(np.isfinite(labels)):
        raise ValueError("labels must be finite")
    unique, first = np.unique(x_indices, return_index=True)
    if len(unique) != len(x_indices):
        order = np.argsort(x_indices, kind="stable")
        sorted_idx = x_indices[order]
        sorted_lab = labels[order]
        dup = np.flatnonzero(np.diff(sorted_idx) == 0)
        if np.any(np.abs(sorted_lab[dup] - sorted_lab[dup + 1]) > 0):
            point = int(sorted_idx[dup[0]])
            raise ValueError(f"conflicting labels on duplicate support point {point}")
        x_indices, labels = unique, labels[first]

    if len(x_indices) == 1 << m:
        return _full_cube_fit(x_indices, labels, m, rtol)

    norm = float(np.linalg.norm(labels))
    threshold = rtol * (1.0 + norm)
    residuals: dict[int, float] = {}
    for k in range(m + 1):
        masks = masks_up_to_degree(m, k)
        A = parity_design_matrix(x_indices, masks, m)
        coeffs, *_ = np.linalg.lstsq(A, labels, rcond=None)
        res = float(np.linalg.norm(A @ coeffs - labels))
        residuals[k] = res
        if res <= threshold:
            spectrum = np.zeros(1 << m)
            spectrum[masks] = coeffs
            return MinDegreeSolution(FourierSpectrum(m, spectrum), k, residuals)
    raise AssertionError("system consistent at k=m by construction")  # pragma: no cover


@dataclass(frozen=True)
class SupportedTask:
    """Labels for every support point of a generation model, in enumeration order."""

    model: GenerationModel
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.float64)
        if labels.shape != (self.model.support_size(),):
            raise ValueError(
                f"expected {self.model.support_size()} labels, got {labels.shape}"
            )
        if not np.all(np.isfinite(labels)):
            raise ValueError("labels must be finite")
        labels = labels.copy()
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_terms(cls, model: GenerationModel, terms, space: str = "x") -> "SupportedTask":
        """Build labels from a signed-parity term list.

        Each term is (subset, coeff); subsets are 1-based coordinate lists
        interpreted over the data cube ("x") or the latent cube ("z").
        """
        if space not in ("x", "z"):
            raise ValueError("space must be 'x' or 'z'")
        labels = np.zeros(model.support_size())
        for subset, coeff in terms:
            mask = coords_to_mask(subset)
            labels = labels + coeff * model.chi_on_support(mask, latent=(space == "z"))
        return cls(model, labels)

    @classmethod
    def from_json_dict(cls, data: dict, model: GenerationModel | None = None) -> "SupportedTask":
        if model is None:
            model = GenerationModel.from_json_dict(data["model"])
        if "labels" in data:
            return cls(model, data["labels"])
        terms = [(t["subset"], float(t.get("coeff", t.get("sign", 1)))) for t in data["expr"]]
        space = data.get("space", "x")
        return cls.from_terms(model, terms, space)

    @classmethod
    def from_json(cls, text: str, model: GenerationModel | None = None) -> "SupportedTask":
        return cls.from_json_dict(json.loads(text), model)

    def to_json_dict(self) -> dict:
        return {"model": self.model.to_json_dict(), "labels": self.labels.tolist()}


def min_degree_solve(task: SupportedTask, rtol: float = DEFAULT_RESIDUAL_RTOL) -> MinDegreeSolution:
    _, x_indices = task.model.enumerate_support()
    return min_degree_fit(x_indices, task.labels, task.model.m, rtol)


def hamming_extension(d: int, r: int, labels: Sequence[float]) -> FourierSpectrum:
    """The unique degree-<=r function agreeing with the labels on the ball B_r.

    Solves the square system over monomials |S| <= r; the matrix is
    invertible for every (d, r), which the solve asserts.
    """
    if not 0 <= r < d:
        raise ValueError(f"need 0 <= r < d, got r={r}, d={d}")
    points = np.arange(1 << d)[popcounts(d)[np.arange(1 << d)] <= r]
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != points.shape:
        raise ValueError(f"expected labels on all {len(points)} ball points")
    masks = masks_up_to_degree(d, r)
    A = parity_design_matrix(points, masks, d)
    assert A.shape[0] == A.shape[1]
    coeffs = np.linalg.solve(A, labels)  # LinAlgError here would refute uniqueness
    spectrum = np.zeros(1 << d)
    spectrum[masks] = coeffs
    return FourierSpectrum(d, spectrum)


class Realization:
    """A composition of multi-output cube functions reproducing a task.

    Layers are listed in application order: layers[0] consumes the raw
    input, each subsequent layer consumes the previous layer's outputs.
    Intermediate outputs must be sign-valued so the next layer can index
    into its tables; the final layer may be real-valued.
    """

    __slots__ = ("layers",)

    def __init__(self, layers: Sequence[Sequence[TruthTable]]):
        layers = tuple(tuple(layer) for layer in layers)
        if not layers or any(not layer for layer in layers):
            raise ValueError("need at least one non-empty layer")
        for layer in layers:
            if len({t.n for t in layer}) != 1:
                raise ValueError("tables within a layer must share one dimension")
        for prev, cur in zip(layers, layers[1:]):
            if cur[0].n != len(prev):
                raise ValueError(
                    f"layer expects {cur[0].n} inputs but previous layer emits {len(prev)}"
                )
        object.__setattr__(self, "layers", layers)

    def __setattr__(self, name, value):
        raise AttributeError("Realization is immutable")

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].n

    def evaluate_index(self, index: int) -> np.ndarray:
        current = int(index)
        for depth, layer in enumerate(self.layers):
            out = np.array([t.values[current] for t in layer])
            if depth + 1 == len(self.layers):
                return out
            if np.any(np.abs(np.abs(out) - 1.0) > 1e-9):
                raise ValueError(f"layer {depth} produced non-sign values")
            current = int(np.sum((out < 0).astype(np.int64) << np.arange(len(out))))
        return out  # pragma: no cover

    def reproduces(self, task: SupportedTask, atol: float = 1e-8) -> bool:
        if len(self.layers[-1]) != 1:
            raise ValueError("task realizations must end in a single output")
        _, x_indices = task.model.enumerate_support()
        values = np.array([self.evaluate_index(i)[0] for i in x_indices.tolist()])
        return bool(np.max(np.abs(values - task.labels)) <= atol)


def realization_degree(realization: Realization, tol: DegreeTolerance | None = None) -> int:
    """Sum of per-layer degrees (each layer's degree sums its outputs)."""
    return sum(multi_degree(layer, tol) for layer in realization.layers)


class Representation:
    """A map from data points to latent points, stored on the model support.

    Only values on the support matter for task realizations, so the map is
    kept as an index table aligned with the support enumeration.
    """

    __slots__ = ("model", "z_out")

    def __init__(self, model: GenerationModel, z_out: Sequence[int]):
        z_out = np.asarray(z_out, dtype=np.int64)
        if z_out.shape != (model.support_size(),):
            raise ValueError("need one output latent index per support point")
        if np.any(z_out < 0) or np.any(z_out >> model.d):
            raise ValueError("outputs must be latent point indices")
        z_out = z_out.copy()
        z_out.flags.writeable = False
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "z_out", z_out)

    def __setattr__(self, name, value):
        raise AttributeError("Representation is immutable")

    @classmethod
    def inverse_of(cls, model: GenerationModel) -> "Representation":
        z_indices, _ = model.enumerate_support()
        return cls(model, z_indices)

    @classmethod
    def from_latent_bijection(cls, model: GenerationModel, perm: Sequence[int]) -> "Representation":
        """The representation x -> T(psi^{-1}(x)) for a latent bijection T."""
        perm = np.asarray(perm, dtype=np.int64)
        z_indices, _ = model.enumerate_support()
        return cls(model, perm[z_indices])

    def latent_transform_perm(self) -> np.ndarray:
        """The induced map z -> Phi(psi(z)) as an index table over the support."""
        return self.z_out

    def is_bijective_on_latents(self) -> bool:
        if self.model.support_size() != 1 << self.model.d:
            return False
        return len(np.unique(self.z_out)) == 1 << self.model.d

    def component_labels(self, j: int) -> np.ndarray:
        """Values of output coordinate j over the support, as +1/-1."""
        if not 1 <= j <= self.model.d:
            raise ValueError(f"component {j} out of range")
        return 1 - 2 * ((self.z_out >> (j - 1)) & 1)

    def component_min_degrees(self, rtol: float = DEFAULT_RESIDUAL_RTOL) -> tuple[int, ...]:
        """Min-degree cost of each output coordinate as its own task."""
        return tuple(
            min_degree_solve(SupportedTask(self.model, self.component_labels(j)), rtol).degree
            for j in range(1, self.model.d + 1)
        )


def _latent_solution_table(task: SupportedTask, phi: Representation) -> TruthTable:
    """The unique g with g(Phi(x)) = labels(x), as a table over the latent cube."""
    if task.model is not phi.model and task.model.to_json_dict() != phi.model.to_json_dict():
        raise ValueError("task and representation must share a model")
    if task.model.support_size() != 1 << task.model.d:
        raise ValueError("conditional degree requires the full latent support")
    if not phi.is_bijective_on_latents():
        raise ValueError("representation composed with the model is not bijective")
    g = np.empty(1 << task.model.d)
    g[phi.z_out] = task.labels
    return TruthTable(task.model.d, g)


def conditional_degree(
    task: SupportedTask,
    phi: Representation,
    rtol: float = DEFAULT_RESIDUAL_RTOL,
    tol: DegreeTolerance | None = None,
) -> int:
    """Degree saved by solving the task on top of the representation.

    Refuses restricted supports: without the full cube the latent-side
    solution is not unique and the defining maximum degenerates.
    """
    g = _latent_solution_table(task, phi)
    flat = min_degree_solve(task, rtol)
    return flat.degree - degree(wht(g), tol)


def corollary_membership_check(task: SupportedTask, rtol: float = DEFAULT_RESIDUAL_RTOL) -> bool:
    """Positive conditional degree on the true latents forces a task solvable
    with latent degree at most d-1; returns whether the implication holds."""
    phi = Representation.inverse_of(task.model)
    g = _latent_solution_table(task, phi)
    latent_deg = degree(wht(g))
    cond = min_degree_solve(task, rtol).degree - latent_deg
    return (not cond > 0) or latent_deg <= task.model.d - 1
