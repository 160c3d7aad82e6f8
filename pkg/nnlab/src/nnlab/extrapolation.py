"""Polynomial extrapolation: ReLU-only vs mixed-activation MLPs.

Training inputs live on [-1, 1), test inputs on [-2, 2); the question is
which architecture keeps tracking the polynomial outside the training
region.  Comparisons are paired: both architectures see the same
polynomial, the same data, and the same seeds.
"""

from __future__ import annotations

import numpy as np
import torch

from .data import polynomial_datasets
from .models import (
    RELU_SPEC,
    MixedActivationMLP,
    MixedActivationMLPSpec,
    mse,
    train_regression,
)


def run_extrapolation(
    spec: MixedActivationMLPSpec | None = None,
    degree: int = 2,
    n_polys: int = 20,
    seed: int = 0,
    epochs: int = 100,
    width: int | None = None,
) -> dict:
    """Per-polynomial test MSE for both architectures plus summary medians."""
    if degree not in (1, 2, 3):
        raise ValueError("polynomial degree must be 1, 2, or 3")
    spec = spec or MixedActivationMLPSpec()
    if width is not None:
        spec = MixedActivationMLPSpec(spec.depth, width, spec.fractions)
        relu_spec = MixedActivationMLPSpec(spec.depth, width, RELU_SPEC.fractions)
    else:
        relu_spec = MixedActivationMLPSpec(spec.depth, spec.width, RELU_SPEC.fractions)

    rows = []
    for index in range(n_polys):
        rng = np.random.default_rng((seed, index))
        coeffs, x_train, y_train, x_test, y_test = polynomial_datasets(degree, rng)
        tensors = [
            torch.tensor(a, dtype=torch.float32).reshape(-1, 1)
            for a in (x_train, x_test)
        ]
        X_train, X_test = tensors
        y_tr = torch.tensor(y_train, dtype=torch.float32)
        y_te = torch.tensor(y_test, dtype=torch.float32)

        row = {"poly": index, "degree": degree, "coeffs": coeffs.tolist()}
        for name, arch in (("relu", relu_spec), ("mixed", spec)):
            torch.manual_seed(seed * 100003 + index)
            model = MixedActivationMLP(arch, in_dim=1)
            fit = train_regression(
                model, X_train, y_tr, epochs=epochs, weight_decay=1e-4,
                seed=seed * 100003 + index,
            )
            row[f"{name}_train_mse"] = fit["train_mse"]
            row[f"{name}_test_mse"] = float("nan") if fit["diverged"] else mse(model, X_test, y_te)
            row[f"{name}_diverged"] = fit["diverged"]
        rows.append(row)

    valid = [
        r for r in rows if not (r["relu_diverged"] or r["mixed_diverged"])
    ]
    summary = {
        "degree": degree,
        "n_polys": n_polys,
        "n_valid": len(valid),
        "relu_median_test_mse": float(np.median([r["relu_test_mse"] for r in valid])),
        "mixed_median_test_mse": float(np.median([r["mixed_test_mse"] for r in valid])),
    }
    summary["mixed_below_relu"] = (
        summary["mixed_median_test_mse"] < summary["relu_median_test_mse"]
    )
    return {"rows": rows, "summary": summary}
