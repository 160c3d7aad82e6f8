"""Multi-task training with a shared trunk, probed for latent recovery.

n tasks share one representation network; each task owns a small head.
After training, a ridge probe regresses the true latents from the trunk
output over the full cube; identification improves as tasks accumulate.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .data import BooleanModel, parity_labels, signs_from_indices
from .models import SplitActivation


class TrunkWithHeads(nn.Module):
    """Quadratic-activation trunk into d features; one batched MLP head per task."""

    def __init__(self, in_dim: int, latent_dim: int, n_tasks: int, width: int = 64,
                 head_width: int = 32):
        super().__init__()
        counts = (0, 0, width)
        self.trunk = nn.Sequential(
            nn.Linear(in_dim, width),
            SplitActivation(counts),
            nn.Linear(width, width),
            SplitActivation(counts),
            nn.Linear(width, latent_dim),
        )
        scale1 = 1.0 / np.sqrt(latent_dim)
        scale2 = 1.0 / np.sqrt(head_width)
        self.head_w1 = nn.Parameter(torch.randn(n_tasks, latent_dim, head_width) * scale1)
        self.head_b1 = nn.Parameter(torch.zeros(n_tasks, head_width))
        self.head_w2 = nn.Parameter(torch.randn(n_tasks, head_width, 1) * scale2)
        self.head_b2 = nn.Parameter(torch.zeros(n_tasks, 1))

    def representation(self, x: torch.Tensor) -> torch.Tensor:
        return self.trunk(x)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        rep = self.trunk(x)  # (batch, latent)
        hidden = torch.einsum("bl,tlh->bth", rep, self.head_w1) + self.head_b1
        hidden = hidden * hidden  # quadratic heads as well
        out = torch.einsum("bth,tho->bto", hidden, self.head_w2) + self.head_b2
        return out[..., 0]  # (batch, tasks)


def sample_parity_masks(d: int, k: int, n_tasks: int, rng: np.random.Generator) -> list[int]:
    """Non-constant latent parity masks with 1 <= |S| <= k."""
    eligible = [m for m in range(1, 1 << d) if bin(m).count("1") <= k]
    return [int(eligible[rng.integers(len(eligible))]) for _ in range(n_tasks)]


def ridge_probe_mse(features: np.ndarray, targets: np.ndarray, lam: float = 1e-6) -> float:
    """MSE of the ridge least-squares probe (with intercept) to the targets."""
    X = np.hstack([features, np.ones((len(features), 1))])
    gram = X.T @ X + lam * np.eye(X.shape[1])
    weights = np.linalg.solve(gram, X.T @ targets)
    pred = X @ weights
    return float(np.mean((pred - targets) ** 2))


def run_multitask_probe(
    model: BooleanModel,
    k: int = 2,
    n_tasks: int = 64,
    seed: int = 0,
    epochs: int = 300,
    width: int = 64,
) -> dict:
    """Train the shared trunk on n_tasks latent parities of degree <= k and
    report the linear-probe MSE from the representation to the true latents."""
    if n_tasks < 1:
        raise ValueError("need at least one task")
    rng = np.random.default_rng((seed, n_tasks, k))
    masks = sample_parity_masks(model.d, k, n_tasks, rng)

    z_full = model.support_indices(kind="full")
    x_full = model.apply_indices(z_full)
    X = torch.tensor(signs_from_indices(x_full, model.m), dtype=torch.float32)
    Y = torch.tensor(
        np.stack([parity_labels(z_full, m, model.d) for m in masks], axis=1),
        dtype=torch.float32,
    )
    Z = signs_from_indices(z_full, model.d)

    torch.manual_seed(seed)
    net = TrunkWithHeads(model.m, model.d, n_tasks, width=width)
    optimizer = torch.optim.AdamW(net.parameters(), lr=1e-3, weight_decay=0.0)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=epochs)
    generator = torch.Generator().manual_seed(seed)
    batch = 256
    diverged = False
    final_loss = float("inf")
    for _ in range(epochs):
        order = torch.randperm(len(X), generator=generator)
        for lo in range(0, len(X), batch):
            idx = order[lo : lo + batch]
            optimizer.zero_grad()
            loss = torch.mean((net(X[idx]) - Y[idx]) ** 2)
            if not torch.isfinite(loss):
                diverged = True
                break
            loss.backward()
            torch.nn.utils.clip_grad_norm_(net.parameters(), 1.0)
            optimizer.step()
            final_loss = float(loss.detach())
        if diverged:
            break
        scheduler.step()

    with torch.no_grad():
        rep = net.representation(X).numpy()
    probe = ridge_probe_mse(rep, Z)
    identity_probe = ridge_probe_mse(Z, Z)
    return {
        "k": k,
        "n_tasks": n_tasks,
        "train_mse": final_loss,
        "diverged": diverged,
        "probe_mse": probe,
        "identity_probe_mse": identity_probe,
    }
