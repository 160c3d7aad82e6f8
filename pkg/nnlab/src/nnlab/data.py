"""Dataset construction from the degreelab JSON interfaces.

The model schema and bit conventions are consumed as documented by the
companion package, not imported from it: point index bit j encodes
coordinate j+1 (bit 0 means +1, bit 1 means -1); Hamming-ball supports
keep latent indices with popcount <= r; supports enumerate in increasing
latent index order.  A support checksum reproduces the one emitted by
`degreelab model-validate` so bit compatibility is checkable end to end.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np


def _popcounts(n: int) -> np.ndarray:
    table = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        table[(np.arange(1 << n) >> j) & 1 == 1] += 1
    return table


@dataclass(frozen=True)
class BooleanModel:
    """A parsed generation-model JSON document."""

    d: int
    m: int
    component_masks: tuple[int, ...]
    component_signs: tuple[int, ...]
    component_tables: tuple
    support_kind: str
    support_r: int | None

    @classmethod
    def from_json_dict(cls, data: dict) -> "BooleanModel":
        d, m = int(data["d"]), int(data["m"])
        masks, signs, tables = [], [], []
        for entry in data["components"]:
            if "subset" in entry:
                masks.append(sum(1 << (c - 1) for c in entry["subset"]))
                signs.append(int(entry.get("sign", 1)))
                tables.append(None)
            else:
                masks.append(None)
                signs.append(None)
                tables.append(np.asarray(entry["table"], dtype=np.float64))
        support = data.get("support", {"kind": "full"})
        return cls(
            d=d,
            m=m,
            component_masks=tuple(masks),
            component_signs=tuple(signs),
            component_tables=tuple(tables),
            support_kind=support["kind"],
            support_r=support.get("r"),
        )

    @classmethod
    def from_file(cls, path: str) -> "BooleanModel":
        with open(path) as fh:
            data = json.load(fh)
        # accept either a raw model or a `degreelab model-validate` report
        if "model" in data and "d" not in data:
            data = data["model"]
        return cls.from_json_dict(data)

    def support_indices(self, r: int | None = None, kind: str | None = None) -> np.ndarray:
        kind = kind or self.support_kind
        indices = np.arange(1 << self.d)
        if kind == "full":
            return indices
        radius = self.support_r if r is None else r
        return indices[_popcounts(self.d)[indices] <= radius]

    def apply_indices(self, z_indices: np.ndarray) -> np.ndarray:
        """Data-point indices for the given latent indices."""
        pc = _popcounts(self.d)
        out = np.zeros(len(z_indices), dtype=np.int64)
        for i in range(self.m):
            if self.component_masks[i] is not None:
                bits = pc[z_indices & self.component_masks[i]] & 1
                if self.component_signs[i] == -1:
                    bits = bits ^ 1
            else:
                bits = (self.component_tables[i][z_indices] < 0).astype(np.int64)
            out |= bits << i
        return out

    def support_sha256(self) -> str:
        z = self.support_indices()
        x = self.apply_indices(z)
        digest = hashlib.sha256()
        for zi, xi in zip(z.tolist(), x.tolist()):
            digest.update(f"{zi}:{xi};".encode())
        return digest.hexdigest()


def signs_from_indices(indices: np.ndarray, width: int) -> np.ndarray:
    """Decode point indices into rows of +-1 coordinates."""
    return 1.0 - 2.0 * ((indices[:, None] >> np.arange(width)[None, :]) & 1)


def parity_labels(indices: np.ndarray, mask: int, width: int) -> np.ndarray:
    pc = _popcounts(width)
    return 1.0 - 2.0 * (pc[indices & mask] & 1)


def expr_labels(x_indices: np.ndarray, terms, m: int, z_indices=None, d=None) -> np.ndarray:
    """Evaluate a task expression (list of (subset, coeff, space)) per point."""
    out = np.zeros(len(x_indices))
    for subset, coeff, space in terms:
        mask = sum(1 << (c - 1) for c in subset)
        if space == "x":
            out = out + coeff * parity_labels(x_indices, mask, m)
        else:
            out = out + coeff * parity_labels(z_indices, mask, d)
    return out


def boolean_datasets(model: BooleanModel, terms, r: int | None):
    """Training rows on the (possibly restricted) support plus the full cube.

    Returns (X_train, y_train, X_full, y_full) with +-1 feature rows in
    support enumeration order, matching the companion package exactly.
    """
    kind = "full" if r is None or r >= model.d else "hamming"
    z_train = model.support_indices(r=r, kind=kind)
    x_train = model.apply_indices(z_train)
    z_full = model.support_indices(kind="full")
    x_full = model.apply_indices(z_full)
    y_train = expr_labels(x_train, terms, model.m, z_train, model.d)
    y_full = expr_labels(x_full, terms, model.m, z_full, model.d)
    return (
        signs_from_indices(x_train, model.m),
        y_train,
        signs_from_indices(x_full, model.m),
        y_full,
        z_train,
        z_full,
    )


def polynomial_datasets(
    degree: int,
    rng: np.random.Generator,
    n_train: int = 4096,
    n_test: int = 2048,
):
    """One random polynomial with coefficients in [0, 1): train inputs on
    [-1, 1), test inputs on [-2, 2)."""
    coeffs = rng.uniform(0.0, 1.0, size=degree + 1)
    x_train = rng.uniform(-1.0, 1.0, size=n_train)
    x_test = rng.uniform(-2.0, 2.0, size=n_test)
    powers = np.arange(degree + 1)
    y_train = (x_train[:, None] ** powers) @ coeffs
    y_test = (x_test[:, None] ** powers) @ coeffs
    return coeffs, x_train, y_train, x_test, y_test
