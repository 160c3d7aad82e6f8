"""Functions on the Boolean cube {-1,+1}^n and their parity spectra.

Bit-indexing convention, shared by every module in this package: a point of
the cube is an integer index in [0, 2^n); bit j of the index encodes
coordinate x_{j+1}, with bit value 0 meaning x_{j+1} = +1 and bit value 1
meaning x_{j+1} = -1.  Subsets S of coordinates are integer masks under the
same convention (bit j set <=> coordinate j+1 in S).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_DIM = 20
DEFAULT_EPS = 1e-9

__all__ = [
    "MAX_DIM",
    "DEFAULT_EPS",
    "CapacityError",
    "DegreeTolerance",
    "TruthTable",
    "FourierSpectrum",
    "wht",
    "inverse_wht",
    "degree",
    "table_degree",
    "multi_degree",
    "influence",
    "flip_influence",
    "inner_product",
    "popcounts",
    "chi_values",
    "index_to_point",
    "point_to_index",
    "mask_to_coords",
    "coords_to_mask",
]


class CapacityError(ValueError):
    """Raised when a request exceeds the exhaustive-enumeration limits."""


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def popcounts(n: int) -> np.ndarray:
    """Popcount lookup table for all integers in [0, 2^n), cached per n."""
    if n not in _POPCOUNT_CACHE:
        table = np.zeros(1 << n, dtype=np.int64)
        for j in range(n):
            table[(np.arange(1 << n) >> j) & 1 == 1] += 1
        table.flags.writeable = False
        _POPCOUNT_CACHE[n] = table
    return _POPCOUNT_CACHE[n]


def index_to_point(index: int, n: int) -> np.ndarray:
    """Decode a point index into its (+1/-1) coordinate vector."""
    bits = (index >> np.arange(n)) & 1
    return 1 - 2 * bits


def point_to_index(point: Sequence[int]) -> int:
    index = 0
    for j, value in enumerate(point):
        if value == -1:
            index |= 1 << j
        elif value != 1:
            raise ValueError(f"coordinate {j + 1} is {value}, expected +1 or -1")
    return index


def mask_to_coords(mask: int) -> tuple[int, ...]:
    """Render a subset mask as a sorted tuple of 1-based coordinates."""
    coords = []
    j = 0
    while mask >> j:
        if (mask >> j) & 1:
            coords.append(j + 1)
        j += 1
    return tuple(coords)


def coords_to_mask(coords: Iterable[int]) -> int:
    mask = 0
    for c in coords:
        if c < 1:
            raise ValueError(f"coordinates are 1-based, got {c}")
        mask |= 1 << (c - 1)
    return mask


def chi_values(mask: int, n: int) -> np.ndarray:
    """The parity chi_S over all 2^n points, as a +1/-1 integer vector."""
    pc = popcounts(n)
    return 1 - 2 * (pc[np.arange(1 << n) & mask] & 1)


def _check_dim(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise CapacityError(f"cube dimension must be in [1, {MAX_DIM}], got {n}")


@dataclass(frozen=True)
class DegreeTolerance:
    """Relative zero test for spectral coefficients.

    A coefficient c counts as zero iff |c| <= eps * max(1, max_S |f^(S)|).
    The default eps = 1e-9 replaces the exact "coefficient differs from
    zero" test, which is undecidable in floating point.
    """

    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be non-negative")

    def threshold(self, coeffs: np.ndarray) -> float:
        peak = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
        return self.eps * max(1.0, peak)

    def nonzero(self, coeffs: np.ndarray) -> np.ndarray:
        return np.abs(coeffs) > self.threshold(coeffs)


def _freeze(values, dtype=np.float64) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


class TruthTable:
    """A real-valued function on {-1,+1}^n stored densely over point indices."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values):
        _check_dim(n)
        arr = _freeze(values)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values for n={n}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("table values must be finite")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TruthTable is immutable")

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        """Tabulate fn over the cube; fn receives a +1/-1 coordinate vector."""
        _check_dim(n)
        return cls(n, [fn(index_to_point(i, n)) for i in range(1 << n)])

    @classmethod
    def parity(cls, n: int, mask: int, sign: int = 1) -> "TruthTable":
        if mask >> n:
            raise ValueError(f"mask {mask:#x} out of range for n={n}")
        return cls(n, sign * chi_values(mask, n))

    def is_sign_valued(self, atol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(np.abs(self.values) - 1.0) <= atol))

    def __eq__(self, other):
        return (
            isinstance(other, TruthTable)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n})"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "TruthTable":
        data = json.loads(text)
        return cls(int(data["n"]), data["values"])


class FourierSpectrum:
    """Parity-basis coefficients of a cube function, indexed by subset mask."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        _check_dim(n)
        arr = _freeze(coeffs)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} coefficients for n={n}, got {arr.shape}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FourierSpectrum is immutable")

    def support_masks(self, tol: DegreeTolerance | None = None) -> np.ndarray:
        tol = tol or DegreeTolerance()
        return np.flatnonzero(tol.nonzero(self.coeffs))

    def __eq__(self, other):
        return (
            isinstance(other, FourierSpectrum)
            and self.n == other.n
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))

    def __repr__(self):
        return f"FourierSpectrum(n={self.n})"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "coeffs": self.coeffs.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "FourierSpectrum":
        data = json.loads(text)
        return cls(int(data["n"]), data["coeffs"])

    def format_monomials(self, tol: DegreeTolerance | None = None) -> str:
        """Human-readable monomial listing; subsets shown as sorted coordinates."""
        parts = []
        for mask in self.support_masks(tol):
            coeff = self.coeffs[mask]
            name = "1" if mask == 0 else "x" + "*x".join(str(c) for c in mask_to_coords(mask))
            parts.append(f"{coeff:+.12g}*{name}" if mask else f"{coeff:+.12g}")
        return " ".join(parts) if parts else "0"


def _butterfly(values: np.ndarray) -> np.ndarray:
    """Butterfly recursion: out[k] = sum_i (-1)^{popcount(i & k)} in[i].

    Operates on the last axis; leading axes are independent batch entries.
    """
    out = values.astype(np.float64, copy=True)
    size = out.shape[-1]
    lead = out.shape[:-1]
    h = 1
    while h < size:
        out = out.reshape(*lead, -1, 2, h)
        a = out[..., 0, :].copy()
        out[..., 0, :] += out[..., 1, :]
        out[..., 1, :] = a - out[..., 1, :]
        h *= 2
        out = out.reshape(*lead, size)
    return out


def wht(table: TruthTable) -> FourierSpectrum:
    """Transform a table into its parity coefficients: f^(S) = <f, chi_S>."""
    spectral = _butterfly(table.values) / (1 << table.n)
    return FourierSpectrum(table.n, spectral)


def inverse_wht(spec: FourierSpectrum) -> TruthTable:
    """Evaluate f(x) = sum_S f^(S) chi_S(x) back onto the cube."""
    return TruthTable(spec.n, _butterfly(spec.coeffs))


def degree(spec: FourierSpectrum, tol: DegreeTolerance | None = None) -> int:
    """Largest |S| with a nonzero coefficient; 0 for (numerically) constant
    functions, including the all-zero function."""
    masks = spec.support_masks(tol)
    if masks.size == 0:
        return 0
    return int(popcounts(spec.n)[masks].max())


def table_degree(table: TruthTable, tol: DegreeTolerance | None = None) -> int:
    return degree(wht(table), tol)


def multi_degree(tables: Sequence[TruthTable], tol: DegreeTolerance | None = None) -> int:
    """Degree of a multi-output function: the sum of per-output degrees."""
    dims = {t.n for t in tables}
    if len(dims) > 1:
        raise ValueError(f"tables must share one dimension, got {sorted(dims)}")
    return sum(table_degree(t, tol) for t in tables)


def influence(table: TruthTable, i: int) -> float:
    """Influence of coordinate i via the spectral formula sum_{S : i in S} f^(S)^2."""
    if not 1 <= i <= table.n:
        raise ValueError(f"coordinate {i} out of range for n={table.n}")
    coeffs = wht(table).coeffs
    masks = np.arange(1 << table.n)
    return float(np.sum(coeffs[(masks >> (i - 1)) & 1 == 1] ** 2))


def flip_influence(table: TruthTable, i: int) -> float:
    """Pr_x[f(x) != f(x with coordinate i flipped)] for sign-valued tables."""
    if not 1 <= i <= table.n:
        raise ValueError(f"coordinate {i} out of range for n={table.n}")
    if not table.is_sign_valued():
        raise ValueError("flip influence is defined for +1/-1 valued tables")
    flipped = table.values[np.arange(1 << table.n) ^ (1 << (i - 1))]
    return float(np.mean(table.values != flipped))


def inner_product(f: TruthTable, g: TruthTable) -> float:
    """Uniform-measure inner product 2^{-n} sum_x f(x) g(x)."""
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")
    return float(np.dot(f.values, g.values) / (1 << f.n))
