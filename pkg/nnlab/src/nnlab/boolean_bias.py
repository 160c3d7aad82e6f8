"""Low-degree bias of quadratic-activation MLPs under Hamming-ball training.

Training data is the image of a restricted latent support; evaluation runs
on the full cube.  A model that fits the cheap low-degree realization of
the task nails the training distribution and misses out of distribution,
which is exactly what the exact min-degree interpolation predicts; the
oracle variant feeds the model true latents instead of data coordinates.
"""

from __future__ import annotations

import json
import subprocess
import tempfile

import numpy as np
import torch

from .data import BooleanModel, boolean_datasets, signs_from_indices
from .models import QUADRATIC_SPEC, MixedActivationMLP, MixedActivationMLPSpec, mse, train_regression


def _parse_terms(terms) -> list[tuple[tuple[int, ...], float, str]]:
    parsed = []
    for term in terms:
        if isinstance(term, dict):
            parsed.append(
                (
                    tuple(term["subset"]),
                    float(term.get("coeff", term.get("sign", 1))),
                    term.get("space", "x"),
                )
            )
        else:
            subset, coeff = term[0], term[1]
            space = term[2] if len(term) > 2 else "x"
            parsed.append((tuple(subset), float(coeff), space))
    return parsed


def exact_flat_fit_reference(model: BooleanModel, terms, r: int | None) -> dict | None:
    """Ask the companion CLI for the exact min-degree fit on the same support
    and evaluate its spectrum on the full cube.  Returns None when the CLI
    is not installed."""
    kind = "full" if r is None or r >= model.d else "hamming"
    z_train = model.support_indices(r=r, kind=kind)
    x_train = model.apply_indices(z_train)
    _, y_train, _, y_full, _, z_full = boolean_datasets(model, terms, r)
    support = {"kind": "full"} if kind == "full" else {"kind": "hamming", "r": r}
    model_doc = {
        "d": model.d,
        "m": model.m,
        "components": [
            {"subset": [c + 1 for c in range(model.d) if (mask >> c) & 1], "sign": sign}
            for mask, sign in zip(model.component_masks, model.component_signs)
        ],
        "support": support,
    }
    task_doc = {"model": model_doc, "labels": y_train.tolist()}
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(task_doc, fh)
        task_path = fh.name
    try:
        proc = subprocess.run(
            ["degreelab", "minsolve", "--task", task_path],
            capture_output=True,
            text=True,
            timeout=120,
        )
    except FileNotFoundError:
        return None
    if proc.returncode != 0:
        return None
    solution = json.loads(proc.stdout)
    coeffs = np.asarray(solution["spectrum"]["coeffs"])
    x_full = model.apply_indices(z_full)
    # evaluate the returned parity expansion on every full-cube data point
    values = np.zeros(len(x_full))
    for mask in np.flatnonzero(np.abs(coeffs) > 1e-12):
        chi = 1.0 - 2.0 * (np.array([bin(x & int(mask)).count("1") & 1 for x in x_full]))
        values += coeffs[mask] * chi
    return {
        "exact_degree": solution["degree"],
        "exact_ood_mse": float(np.mean((values - y_full) ** 2)),
    }


def run_boolean_bias(
    model: BooleanModel,
    terms,
    r: int | None = 2,
    seed: int = 0,
    oracle: bool = False,
    epochs: int | None = None,
    width: int = 128,
    depth: int | None = None,
    cross_reference: bool = True,
) -> dict:
    """Train a quadratic-activation MLP on the restricted support; report ID
    and OOD MSE, optionally next to the exact min-degree fit.

    The oracle variant feeds the network true latents and defaults to a
    single quadratic hidden layer: with r = 2 the head class is exactly the
    degree-2 functions, so driving the training error to zero selects the
    unique ball extension.  The flat variant keeps two hidden layers.
    """
    terms = _parse_terms(terms)
    X_train, y_train, X_full, y_full, z_train, z_full = boolean_datasets(model, terms, r)
    if oracle:
        X_train = signs_from_indices(z_train, model.d)
        X_full = signs_from_indices(z_full, model.d)
    if depth is None:
        depth = 2 if oracle else 3
    if epochs is None:
        epochs = 2000 if oracle else 600

    spec = MixedActivationMLPSpec(depth=depth, width=width, fractions=QUADRATIC_SPEC.fractions)
    torch.manual_seed(seed)
    net = MixedActivationMLP(spec, in_dim=X_train.shape[1], init_gain=0.5)
    Xt = torch.tensor(X_train, dtype=torch.float32)
    yt = torch.tensor(y_train, dtype=torch.float32)
    lr = 1e-3 if oracle else 3e-4
    fit = train_regression(net, Xt, yt, epochs=epochs, lr=lr, seed=seed, batch_size=64)

    Xf = torch.tensor(X_full, dtype=torch.float32)
    yf = torch.tensor(y_full, dtype=torch.float32)
    result = {
        "r": r,
        "oracle": oracle,
        "diverged": fit["diverged"],
        "id_mse": mse(net, Xt, yt),
        "ood_mse": mse(net, Xf, yf),
    }
    if cross_reference and not oracle:
        reference = exact_flat_fit_reference(model, terms, r)
        if reference is not None:
            result.update(reference)
    return result
