"""Latent generation maps from {-1,+1}^d into {-1,+1}^m and their supports.

A model is a tuple of m component functions of the d latent coordinates,
either signed parities or explicit tables, together with a support
specification (the full latent cube or a Hamming ball).  Injectivity on the
support is established by enumeration when the model is built; nothing here
is ever assumed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boolfn import (
    CapacityError,
    MAX_DIM,
    TruthTable,
    coords_to_mask,
    mask_to_coords,
    popcounts,
    table_degree,
)

__all__ = [
    "SupportSpec",
    "ParityComponent",
    "GenerationModel",
    "ModelValidation",
    "NonInjectiveError",
    "builtin_model",
    "BUILTIN_MODELS",
]


class NonInjectiveError(ValueError):
    """The map collides on its support; carries one colliding pair."""

    def __init__(self, z_a: int, z_b: int, x: int):
        self.z_a, self.z_b, self.x = z_a, z_b, x
        super().__init__(
            f"latent indices {z_a} and {z_b} both map to data index {x}"
        )


@dataclass(frozen=True)
class SupportSpec:
    """Latent support: the full cube, or the Hamming ball of points with at
    most r coordinates equal to -1."""

    kind: str  # "full" | "hamming"
    r: int | None = None

    def __post_init__(self):
        if self.kind not in ("full", "hamming"):
            raise ValueError(f"unknown support kind {self.kind!r}")
        if self.kind == "hamming":
            if self.r is None or self.r < 0:
                raise ValueError("hamming support needs a radius r >= 0")
        elif self.r is not None:
            raise ValueError("full support takes no radius")

    def indices(self, d: int) -> np.ndarray:
        """Support point indices in increasing index order."""
        if self.kind == "hamming" and self.r >= d:
            raise ValueError(f"hamming radius must satisfy r < d, got r={self.r}, d={d}")
        all_points = np.arange(1 << d)
        if self.kind == "full":
            return all_points
        return all_points[popcounts(d)[all_points] <= self.r]

    def size(self, d: int) -> int:
        return len(self.indices(d))

    def to_json_dict(self) -> dict:
        if self.kind == "full":
            return {"kind": "full"}
        return {"kind": "hamming", "r": self.r}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SupportSpec":
        if data["kind"] == "full":
            return cls("full")
        return cls("hamming", int(data["r"]))


FULL_SUPPORT = SupportSpec("full")


@dataclass(frozen=True)
class ParityComponent:
    """One output coordinate x_i = sign * prod_{j in subset} z_j."""

    mask: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if self.mask < 0:
            raise ValueError("mask must be non-negative")

    @property
    def degree(self) -> int:
        return int(self.mask).bit_count()


@dataclass(frozen=True)
class ModelValidation:
    injective: bool
    support_size: int
    image_size: int
    component_degrees: tuple[int, ...]
    collision: tuple[int, int, int] | None  # (z_a, z_b, x) when not injective

    def to_json_dict(self) -> dict:
        return {
            "injective": self.injective,
            "support_size": self.support_size,
            "image_size": self.image_size,
            "component_degrees": list(self.component_degrees),
            "collision": list(self.collision) if self.collision else None,
        }


class GenerationModel:
    """An injective map from the latent cube into the data cube."""

    __slots__ = ("d", "m", "components", "support", "_z_indices", "_x_indices", "_inverse")

    def __init__(self, d, m, components, support=FULL_SUPPORT, check=True):
        if not 1 <= d <= MAX_DIM:
            raise CapacityError(f"latent dimension must be in [1, {MAX_DIM}], got {d}")
        if m < d:
            raise ValueError(f"need m >= d, got m={m}, d={d}")
        if m > MAX_DIM:
            raise CapacityError(f"data dimension must be <= {MAX_DIM}, got {m}")
        if len(components) != m:
            raise ValueError(f"expected {m} components, got {len(components)}")
        comps = []
        for c in components:
            if isinstance(c, ParityComponent):
                if c.mask >> d:
                    raise ValueError(f"component mask {c.mask:#x} exceeds d={d}")
            elif isinstance(c, TruthTable):
                if c.n != d:
                    raise ValueError("table components must live on the latent cube")
                if not c.is_sign_valued():
                    raise ValueError("table components must be +1/-1 valued")
            else:
                raise TypeError(f"unsupported component {type(c).__name__}")
            comps.append(c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "support", support)
        z = support.indices(d)
        x = self._apply_indices(z)
        object.__setattr__(self, "_z_indices", z)
        object.__setattr__(self, "_x_indices", x)
        inverse = {}
        collision = None
        for zi, xi in zip(z.tolist(), x.tolist()):
            if xi in inverse:
                collision = (inverse[xi], zi, xi)
                break
            inverse[xi] = zi
        if collision is not None:
            object.__setattr__(self, "_inverse", collision)
            if check:
                raise NonInjectiveError(*collision)
        else:
            object.__setattr__(self, "_inverse", inverse)

    def __setattr__(self, name, value):
        raise AttributeError("GenerationModel is immutable")

    def _component_bits(self, z_indices: np.ndarray, i: int) -> np.ndarray:
        """Bit value (1 means -1) of output coordinate i+1 on given latents."""
        c = self.components[i]
        if isinstance(c, ParityComponent):
            bits = popcounts(self.d)[z_indices & c.mask] & 1
            return bits ^ 1 if c.sign == -1 else bits
        return (c.values[z_indices] < 0).astype(np.int64)

    def _apply_indices(self, z_indices: np.ndarray) -> np.ndarray:
        out = np.zeros(len(z_indices), dtype=np.int64)
        for i in range(self.m):
            out |= self._component_bits(z_indices, i) << i
        return out

    def apply_index(self, z_index: int) -> int:
        return int(self._apply_indices(np.array([z_index]))[0])

    def apply(self, z: Sequence[int]) -> np.ndarray:
        """Map one +1/-1 latent vector to its +1/-1 data vector."""
        z = np.asarray(z)
        if z.shape != (self.d,):
            raise ValueError(f"expected a latent vector of length {self.d}")
        index = int(np.sum((z < 0).astype(np.int64) << np.arange(self.d)))
        x_index = self.apply_index(index)
        return 1 - 2 * ((x_index >> np.arange(self.m)) & 1)

    @property
    def is_injective(self) -> bool:
        return isinstance(self._inverse, dict)

    def invert_index(self, x_index: int) -> int | None:
        """Unique latent preimage of a data index, or None when not in the image."""
        if not self.is_injective:
            raise NonInjectiveError(*self._inverse)
        return self._inverse.get(x_index)

    def invert(self, x: Sequence[int]) -> np.ndarray | None:
        x = np.asarray(x)
        if x.shape != (self.m,):
            raise ValueError(f"expected a data vector of length {self.m}")
        index = int(np.sum((x < 0).astype(np.int64) << np.arange(self.m)))
        z_index = self.invert_index(index)
        if z_index is None:
            return None
        return 1 - 2 * ((z_index >> np.arange(self.d)) & 1)

    def enumerate_support(self) -> tuple[np.ndarray, np.ndarray]:
        """All (z index, x index) pairs in support enumeration order."""
        return self._z_indices, self._x_indices

    def support_size(self) -> int:
        return len(self._z_indices)

    def component_table(self, i: int) -> TruthTable:
        c = self.components[i]
        if isinstance(c, TruthTable):
            return c
        return TruthTable.parity(self.d, c.mask, c.sign)

    def component_degrees(self) -> tuple[int, ...]:
        return tuple(
            c.degree if isinstance(c, ParityComponent) else table_degree(c)
            for c in self.components
        )

    def validate(self) -> ModelValidation:
        collision = None if self.is_injective else self._inverse
        image_size = len(self._inverse) if self.is_injective else len(set(self._x_indices.tolist()))
        return ModelValidation(
            injective=self.is_injective,
            support_size=len(self._z_indices),
            image_size=image_size,
            component_degrees=self.component_degrees(),
            collision=collision,
        )

    def latent_values(self, j: int) -> np.ndarray:
        """Values of latent coordinate j over the support, in enumeration order."""
        if not 1 <= j <= self.d:
            raise ValueError(f"latent coordinate {j} out of range")
        return 1 - 2 * ((self._z_indices >> (j - 1)) & 1)

    def chi_on_support(self, mask: int, latent: bool = True) -> np.ndarray:
        """Parity values over the support: chi_S(z) or chi_S(x) per point."""
        indices = self._z_indices if latent else self._x_indices
        n = self.d if latent else self.m
        return 1 - 2 * (popcounts(n)[indices & mask] & 1)

    def to_json_dict(self) -> dict:
        comps = []
        for c in self.components:
            if isinstance(c, ParityComponent):
                comps.append({"subset": list(mask_to_coords(c.mask)), "sign": c.sign})
            else:
                comps.append({"table": c.values.tolist()})
        return {
            "d": self.d,
            "m": self.m,
            "components": comps,
            "support": self.support.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict, check: bool = True) -> "GenerationModel":
        d, m = int(data["d"]), int(data["m"])
        comps = []
        for entry in data["components"]:
            if "subset" in entry:
                comps.append(
                    ParityComponent(coords_to_mask(entry["subset"]), int(entry.get("sign", 1)))
                )
            else:
                comps.append(TruthTable(d, entry["table"]))
        support = SupportSpec.from_json_dict(data.get("support", {"kind": "full"}))
        return cls(d, m, comps, support, check=check)

    @classmethod
    def from_json(cls, text: str, check: bool = True) -> "GenerationModel":
        return cls.from_json_dict(json.loads(text), check=check)


def _table1_components() -> list[ParityComponent]:
    subsets = [
        [1],
        [1, 2],
        [1, 2, 3],
        [1, 2, 3, 4],
        [1, 2, 3, 4, 5],
        [2, 3, 4, 5, 6],
        [3, 4, 5, 6, 7],
        [4, 5, 6, 7, 8],
        [5, 6, 7, 8, 9],
        [6, 7, 8, 9, 10],
    ]
    return [ParityComponent(coords_to_mask(s)) for s in subsets]


def _builtin(name: str, support: SupportSpec = FULL_SUPPORT) -> GenerationModel:
    if name == "table1":
        return GenerationModel(10, 10, _table1_components(), support)
    if name == "triple2":
        comps = [ParityComponent(0b01), ParityComponent(0b10), ParityComponent(0b11)]
        return GenerationModel(2, 3, comps, support)
    if name == "chain3":
        comps = [ParityComponent(0b001), ParityComponent(0b011), ParityComponent(0b101)]
        return GenerationModel(3, 3, comps, support)
    raise KeyError(name)


BUILTIN_MODELS = ("table1", "triple2", "chain3")


def builtin_model(name: str, support: SupportSpec = FULL_SUPPORT) -> GenerationModel:
    """Models shipped with the package.

    table1:  d=m=10 chain of widening parities used in the numerical studies.
    triple2: d=2, m=3 with components (z1, z2, z1*z2).
    chain3:  d=3, m=3 with components (z1, z1*z2, z1*z3).
    """
    if name not in BUILTIN_MODELS:
        raise KeyError(f"unknown builtin model {name!r}; have {BUILTIN_MODELS}")
    return _builtin(name, support)
