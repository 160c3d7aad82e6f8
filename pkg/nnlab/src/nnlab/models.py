"""MLPs with per-unit activation mixes.

The mixed architecture splits every hidden layer's units between ReLU,
identity, and squaring; the polynomial-friendly pair (identity + square)
lets depth compose monomials while ReLU keeps the generic approximation
path available.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class MixedActivationMLPSpec:
    """Architecture description: `fractions` orders (relu, identity, square)."""

    depth: int = 4
    width: int = 64
    fractions: tuple[float, float, float] = (0.5, 0.25, 0.25)

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("need at least one hidden layer")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError("activation fractions must sum to 1")
        if any(f < 0 for f in self.fractions):
            raise ValueError("activation fractions must be non-negative")
        for count, fraction in zip(self.unit_counts(), self.fractions):
            if fraction > 0 and count == 0:
                raise ValueError(
                    f"width {self.width} leaves an empty slot for fraction {fraction}"
                )

    def unit_counts(self) -> tuple[int, int, int]:
        n_relu = round(self.width * self.fractions[0])
        n_identity = round(self.width * self.fractions[1])
        n_square = self.width - n_relu - n_identity
        return n_relu, n_identity, n_square


RELU_SPEC = MixedActivationMLPSpec(fractions=(1.0, 0.0, 0.0))
QUADRATIC_SPEC = MixedActivationMLPSpec(fractions=(0.0, 0.0, 1.0))


class SplitActivation(nn.Module):
    """Apply relu / identity / square to consecutive unit groups."""

    def __init__(self, counts: tuple[int, int, int]):
        super().__init__()
        self.counts = counts

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        n_relu, n_identity, _ = self.counts
        pieces = []
        if n_relu:
            pieces.append(torch.relu(x[..., :n_relu]))
        if n_identity:
            pieces.append(x[..., n_relu : n_relu + n_identity])
        rest = x[..., n_relu + n_identity :]
        if rest.shape[-1]:
            pieces.append(rest * rest)
        return torch.cat(pieces, dim=-1)


class MixedActivationMLP(nn.Module):
    def __init__(self, spec: MixedActivationMLPSpec, in_dim: int, out_dim: int = 1,
                 init_gain: float = 1.0):
        super().__init__()
        counts = spec.unit_counts()
        layers: list[nn.Module] = []
        width = spec.width
        dims = [in_dim] + [width] * (spec.depth - 1)
        for a, b in zip(dims[:-1], dims[1:]):
            linear = nn.Linear(a, b)
            layers.append(linear)
            layers.append(SplitActivation(counts))
        layers.append(nn.Linear(width, out_dim))
        self.net = nn.Sequential(*layers)
        if init_gain != 1.0:
            with torch.no_grad():
                for module in self.net:
                    if isinstance(module, nn.Linear):
                        module.weight.mul_(init_gain)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


def train_regression(
    model: nn.Module,
    X: torch.Tensor,
    y: torch.Tensor,
    epochs: int,
    lr: float = 1e-3,
    weight_decay: float = 0.0,
    batch_size: int = 256,
    seed: int = 0,
    clip: float | None = 1.0,
) -> dict:
    """Full training loop; returns final train MSE and a divergence flag."""
    generator = torch.Generator().manual_seed(seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=lr, weight_decay=weight_decay)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=epochs)
    n = len(X)
    diverged = False
    loss_value = float("inf")
    for _ in range(epochs):
        order = torch.randperm(n, generator=generator)
        for lo in range(0, n, batch_size):
            idx = order[lo : lo + batch_size]
            optimizer.zero_grad()
            loss = torch.mean((model(X[idx]).squeeze(-1) - y[idx]) ** 2)
            if not torch.isfinite(loss):
                diverged = True
                break
            loss.backward()
            if clip is not None:
                torch.nn.utils.clip_grad_norm_(model.parameters(), clip)
            optimizer.step()
            loss_value = float(loss.detach())
        if diverged:
            break
        scheduler.step()
    return {"train_mse": loss_value, "diverged": diverged}


@torch.no_grad()
def mse(model: nn.Module, X: torch.Tensor, y: torch.Tensor) -> float:
    return float(torch.mean((model(X).squeeze(-1) - y) ** 2))
