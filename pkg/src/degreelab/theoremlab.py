"""Executable verification of the package's headline claims.

Every verifier returns a VerificationReport with the measured quantities
and a pass/fail verdict.  Exhaustive runs at d <= 3 use exact integer
spectra (no tolerances on degrees); task averages over parity families are
exact rationals.  Wall-clock runtime is recorded on the report object but
kept out of the canonical serialization so that reports are reproducible
byte for byte from (claim, parameters, seed).
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .boolfn import (
    DEFAULT_EPS,
    DegreeTolerance,
    TruthTable,
    chi_values,
    coords_to_mask,
    degree,
    popcounts,
    wht,
)
from .boolfn import _butterfly  # shared batch transform kernel
from .genmodel import GenerationModel, ParityComponent, SupportSpec, builtin_model
from .minsolve import (
    Representation,
    SupportedTask,
    hamming_extension,
    min_degree_solve,
)
from .tasks import DegreeMixture, ParityFamily, RandomPolynomialFamily, sample_task
from .transforms import (
    BasisTransform,
    CubeBijection,
    SignedPermutation,
    is_compatible,
    preserves_Fk,
)

__all__ = [
    "VerificationReport",
    "ObjectiveEvaluation",
    "objective",
    "verify_single_task",
    "verify_multi_task_bound",
    "verify_no_free_lunch",
    "verify_world_model",
    "verify_example_counterexample",
    "verify_ood_benefit",
    "search_ood_configurations",
    "verify_basis_impact",
    "verify_degree_composition",
    "VERIFIERS",
    "run_claim",
]


# ---------------------------------------------------------------------------
# reports


def _plain(value):
    """Convert measured values to canonical JSON-ready python objects."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


@dataclass
class VerificationReport:
    """Self-contained record of one verification run."""

    claim: str
    params: dict
    measured: dict
    passed: bool
    runtime_seconds: float = 0.0
    extras: dict = field(default_factory=dict, repr=False)  # not serialized

    def to_json_dict(self, include_runtime: bool = False) -> dict:
        data = {
            "claim": self.claim,
            "params": _plain(self.params),
            "measured": _plain(self.measured),
            "passed": self.passed,
        }
        if include_runtime:
            data["runtime_seconds"] = self.runtime_seconds
        return data

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_json_dict(include_runtime), sort_keys=True, indent=2)


def _timed(claim: str, params: dict, body: Callable[[], tuple[dict, bool, dict]]) -> VerificationReport:
    start = time.perf_counter()
    measured, passed, extras = body()
    return VerificationReport(
        claim=claim,
        params=params,
        measured=measured,
        passed=passed,
        runtime_seconds=time.perf_counter() - start,
        extras=extras,
    )


# ---------------------------------------------------------------------------
# exact batch machinery over permutations

_HADAMARD_CACHE: dict[int, np.ndarray] = {}


def _hadamard(d: int) -> np.ndarray:
    if d not in _HADAMARD_CACHE:
        size = 1 << d
        grid = np.arange(size)
        H = 1 - 2 * (popcounts(d)[grid[:, None] & grid[None, :]] & 1).astype(np.int64)
        H.flags.writeable = False
        _HADAMARD_CACHE[d] = H
    return _HADAMARD_CACHE[d]


def _batch_mask_values(perms: np.ndarray, d: int, cost: np.ndarray) -> np.ndarray:
    """For each permutation row T and each mask S, the worst `cost` among the
    parities appearing in the exact integer spectrum of chi_S o T.

    With cost = popcount this is deg(chi_S o T).  Spectra come from the
    batch butterfly on +-1 tables, whose integer sums stay exact in floats.
    """
    H = _hadamard(d)
    size = 1 << d
    out = np.empty((len(perms), size), dtype=np.int64)
    chunk = max(1, (1 << 21) // (size * size))  # keep transients tens of MB
    for lo in range(0, len(perms), chunk):
        block = perms[lo : lo + chunk]
        tables = np.swapaxes(H[block, :], 1, 2).astype(np.float64)  # (B, S, z)
        spectra = _butterfly(tables)
        values = np.where(spectra != 0, cost[None, None, :], -1).max(axis=2)
        out[lo : lo + chunk] = np.maximum(values, 0)
    return out


def _family_degree_sums(mask_values: np.ndarray, d: int) -> np.ndarray:
    """Per-batch sums of mask values over the nested families |S| <= k."""
    pc = popcounts(d)[np.arange(1 << d)]
    sums = np.empty((len(mask_values), d), dtype=np.int64)
    for k in range(1, d + 1):
        sums[:, k - 1] = mask_values[:, pc <= k].sum(axis=1)
    return sums


def _family_sizes(d: int) -> list[int]:
    return [int(np.sum(popcounts(d)[np.arange(1 << d)] <= k)) for k in range(1, d + 1)]


def _all_perms(d: int) -> np.ndarray:
    """All (2^d)! permutations in lexicographic order (d <= 3)."""
    if d > 3:
        raise ValueError("full enumeration is restricted to d <= 3")
    return np.array(list(itertools.permutations(range(1 << d))), dtype=np.int64)


def _invert_perms(perms: np.ndarray) -> np.ndarray:
    return np.argsort(perms, axis=1)


def _signed_perm_set(d: int) -> set[tuple[int, ...]]:
    return {
        tuple(sp.to_bijection().perm.tolist()) for sp in SignedPermutation.enumerate_all(d)
    }


def _objective_from_sums(sums_row: Sequence[int], sizes: Sequence[int], mixture: DegreeMixture) -> Fraction:
    total = Fraction(0)
    for k in range(1, mixture.d + 1):
        p = mixture[k]
        if p:
            total += p * Fraction(int(sums_row[k - 1]), sizes[k - 1])
    return total


def _exact_objectives(perms: np.ndarray, d: int, mixture: DegreeMixture, cost: np.ndarray) -> list[Fraction]:
    """Exact mixture objective for each permutation row (applied as T^{-1})."""
    values = _batch_mask_values(_invert_perms(perms), d, cost)
    sums = _family_degree_sums(values, d)
    sizes = _family_sizes(d)
    unique, inverse = np.unique(sums, axis=0, return_inverse=True)
    per_unique = [_objective_from_sums(row, sizes, mixture) for row in unique]
    return [per_unique[i] for i in inverse]


def _example_transform_perm() -> np.ndarray:
    """Components (z1, z1*z2, z1*z3): the known non-identity minimizer at p1=0."""
    tables = [
        TruthTable(3, chi_values(0b001, 3)),
        TruthTable(3, chi_values(0b011, 3)),
        TruthTable(3, chi_values(0b101, 3)),
    ]
    return CubeBijection.from_components(tables).perm


# ---------------------------------------------------------------------------
# the n -> infinity objective


@dataclass(frozen=True)
class ObjectiveEvaluation:
    """Expected latent realization degree of tasks re-expressed through T."""

    value: Fraction | float
    per_degree: dict[int, Fraction | float]
    mode: str

    def to_json_dict(self) -> dict:
        return {
            "value": _plain(self.value),
            "per_degree": {str(k): _plain(v) for k, v in sorted(self.per_degree.items())},
            "mode": self.mode,
        }


def objective(
    T: CubeBijection,
    weights: DegreeMixture | str = "uniform-full",
    mode: str = "exact",
    seed: int | None = None,
    samples: int = 2000,
) -> ObjectiveEvaluation:
    """Average degree of family tasks after re-expression through T^{-1}.

    weights is a DegreeMixture over k = 1..d, or "uniform-full" for the
    single full family k = d.  Exact mode averages over the signed parity
    family; sampled mode Monte-Carlo estimates the same quantity.
    """
    d = T.d
    if weights == "uniform-full":
        mixture = DegreeMixture([Fraction(0)] * (d - 1) + [Fraction(1)])
    elif isinstance(weights, DegreeMixture):
        if weights.d != d:
            raise ValueError("mixture length must equal the cube dimension")
        mixture = weights
    else:
        raise ValueError(f"unsupported weights {weights!r}")

    if mode == "exact":
        pc = popcounts(d)[np.arange(1 << d)].astype(np.int64)
        values = _batch_mask_values(T.inverse().perm[None, :], d, pc)[0]
        sums = _family_degree_sums(values[None, :], d)[0]
        sizes = _family_sizes(d)
        per_degree = {
            k: Fraction(int(sums[k - 1]), sizes[k - 1]) for k in range(1, d + 1)
        }
        value = sum(
            (mixture[k] * per_degree[k] for k in range(1, d + 1)), start=Fraction(0)
        )
        return ObjectiveEvaluation(value, per_degree, "exact")

    if mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode requires a seed")
        rng = np.random.default_rng(seed)
        inv = T.inverse()
        probs = mixture.as_floats()
        per_degree_draws: dict[int, list[int]] = {k: [] for k in range(1, d + 1)}
        masks_by_k = [
            np.flatnonzero(popcounts(d)[np.arange(1 << d)] <= k) for k in range(1, d + 1)
        ]
        degs = _batch_mask_values(inv.perm[None, :], d, popcounts(d)[np.arange(1 << d)].astype(np.int64))[0]
        for _ in range(samples):
            k = int(rng.choice(np.arange(1, d + 1), p=probs))
            mask = int(rng.choice(masks_by_k[k - 1]))
            per_degree_draws[k].append(int(degs[mask]))
        per_degree = {
            k: (float(np.mean(v)) if v else float("nan")) for k, v in per_degree_draws.items()
        }
        value = float(
            sum(
                probs[k - 1] * per_degree[k]
                for k in range(1, d + 1)
                if per_degree_draws[k]
            )
        )
        return ObjectiveEvaluation(value, per_degree, "sampled")

    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Theorem: single-task flat solutions are never beaten


def _batch_table_degrees(tables: np.ndarray, d: int, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Degrees of many real-valued tables at once (rows of `tables`)."""
    coeffs = _butterfly(tables) / (1 << d)
    thresh = eps * np.maximum(1.0, np.abs(coeffs).max(axis=1))
    nonzero = np.abs(coeffs) > thresh[:, None]
    pc = popcounts(d)[np.arange(1 << d)]
    return np.where(nonzero, pc[None, :], -1).max(axis=1).clip(min=0)


def _phi_component_cost(model: GenerationModel, perms: np.ndarray) -> np.ndarray:
    """Sum_j deg(Phi_j) for Phi = T o psi^{-1}, for each permutation row T.

    Components are min-degree implementations over the support; for the
    bijective m = d models used here the support is the full data cube, so
    the component cost is the exact transform degree.
    """
    if model.support_size() != 1 << model.m:
        raise ValueError("exhaustive realization costs need a full bijective model")
    z_indices, x_indices = model.enumerate_support()
    order = np.empty(1 << model.m, dtype=np.int64)
    order[x_indices] = z_indices  # x index -> latent index
    total = np.zeros(len(perms), dtype=np.int64)
    for j in range(model.d):
        bits = (perms[:, order] >> j) & 1  # component j of T at psi^{-1}(x)
        total += _batch_table_degrees(1.0 - 2.0 * bits, model.m)
    return total


def verify_single_task(
    d: int = 2,
    model: GenerationModel | str | None = None,
    trials: int = 0,
    seed: int = 0,
) -> VerificationReport:
    """Flat min-degree realizations never exceed hierarchical ones in
    realization degree; exhaustive over bijective-latent representations."""
    if model is None:
        model = "triple2" if d == 2 else "chain3"
    if isinstance(model, str):
        model = builtin_model(model)
    if model.d != d:
        raise ValueError(f"model has latent dimension {model.d}, expected {d}")
    if d > 3:
        raise ValueError("single-task verification is exhaustive and needs d <= 3")
    params = {"d": d, "model": model.to_json_dict(), "trials": trials, "seed": seed}

    def body():
        perms = _all_perms(d)
        inv_perms = _invert_perms(perms)
        phi_costs = _phi_component_cost(model, perms) if model.m == model.d else None
        if phi_costs is None:
            # restricted image: per-coordinate min-degree solves, one per T
            phi_costs = np.array(
                [
                    sum(
                        Representation.from_latent_bijection(model, perm).component_min_degrees()
                    )
                    for perm in perms
                ],
                dtype=np.int64,
            )
        z_indices, _ = model.enumerate_support()

        if trials == 0:
            tasks = []
            for mask in range(1 << model.m):
                for sign in (1, -1):
                    tasks.append(sign * model.chi_on_support(mask, latent=False).astype(float))
        else:
            rng = np.random.default_rng(seed)
            family = RandomPolynomialFamily(model, d)
            tasks = [sample_task(family, rng).labels for _ in range(trials)]

        violations = 0
        checked = 0
        for labels in tasks:
            flat = min_degree_solve(SupportedTask(model, labels)).degree
            g_tables = np.asarray(labels)[inv_perms]  # g = h o psi o T^{-1}
            g_degrees = _batch_table_degrees(g_tables, d)
            checked += len(perms)
            violations += int(np.sum(flat > g_degrees + phi_costs))
        measured = {
            "tasks": len(tasks),
            "transforms": len(perms),
            "pairs_checked": checked,
            "violations": violations,
        }
        return measured, violations == 0, {}

    return _timed("single-task", params, body)


# ---------------------------------------------------------------------------
# Theorem: the multi-task realization-degree gap bound


def verify_multi_task_bound(
    d: int = 10,
    model: GenerationModel | str = "table1",
    n_tasks: int = 64,
    seed: int = 0,
    batches: int = 1,
    k: int = 3,
    phi: str = "inverse",
) -> VerificationReport:
    """Gap between flat and hierarchical realization degrees is bounded below
    by the summed conditional degrees minus d^2."""
    if isinstance(model, str):
        model = builtin_model(model)
    if model.d != d:
        raise ValueError(f"model has latent dimension {model.d}, expected {d}")
    if model.support_size() != 1 << model.d:
        raise ValueError("the bound is stated on the full latent support")
    params = {
        "d": d,
        "model": model.to_json_dict(),
        "n_tasks": n_tasks,
        "seed": seed,
        "batches": batches,
        "k": k,
        "phi": phi,
    }

    def body():
        rng = np.random.default_rng(seed)
        family = ParityFamily(model, k)
        masks = family.masks
        flat_cache: dict[int, int] = {}

        def flat_degree(mask: int) -> int:
            if mask not in flat_cache:
                flat_cache[mask] = min_degree_solve(family.task(mask, 1)).degree
            return flat_cache[mask]

        results = []
        violations = 0
        for batch in range(batches):
            batch_rng = np.random.default_rng((seed, batch))
            if phi == "inverse":
                perm = np.arange(1 << d)
            elif phi == "signed":
                order = batch_rng.permutation(d)
                signs = batch_rng.choice([1, -1], size=d)
                perm = SignedPermutation(tuple(order.tolist()), tuple(signs.tolist())).to_bijection().perm
            elif phi == "random":
                perm = batch_rng.permutation(1 << d)
            else:
                raise ValueError(f"unknown phi mode {phi!r}")
            T = CubeBijection(d, perm)
            phi_cost = int(_phi_component_cost(model, perm[None, :])[0])
            inv_degs = _batch_mask_values(
                T.inverse().perm[None, :], d, popcounts(d)[np.arange(1 << d)].astype(np.int64)
            )[0]

            drawn = masks[batch_rng.integers(len(masks), size=n_tasks)]
            flat_sum = int(sum(flat_degree(int(m)) for m in drawn))
            g_sum = int(sum(int(inv_degs[int(m)]) for m in drawn))
            cond_sum = int(
                sum(flat_degree(int(m)) - int(inv_degs[int(m)]) for m in drawn)
            )
            lhs = flat_sum - (g_sum + phi_cost)
            rhs = cond_sum - d * d
            if lhs < rhs:
                violations += 1
            results.append(
                {
                    "batch": batch,
                    "lhs": lhs,
                    "rhs": rhs,
                    "slack": lhs - rhs,
                    "phi_cost": phi_cost,
                    "conditional_degree_sum": cond_sum,
                    "hierarchy_preferred": flat_sum > g_sum + phi_cost,
                }
            )
        measured = {
            "batches": results,
            "violations": violations,
            "mean_gap": float(np.mean([b["lhs"] for b in results])),
            "mean_slack": float(np.mean([b["slack"] for b in results])),
            "mean_conditional_degree_sum": float(
                np.mean([b["conditional_degree_sum"] for b in results])
            ),
            "hierarchy_preferred_fraction": float(
                np.mean([b["hierarchy_preferred"] for b in results])
            ),
        }
        return measured, violations == 0, {}

    return _timed("multi-task", params, body)


# ---------------------------------------------------------------------------
# Theorem: uniform task sampling cannot distinguish representations


def verify_no_free_lunch(d: int = 3, seed: int = 0) -> VerificationReport:
    """The uniform full-space objective is one constant across all bijections.

    The exact average runs over every sign-valued table on the cube: that
    family is closed under h -> h o T for arbitrary bijections (composition
    merely reorders table entries), which is the mechanism behind the claim.
    The signed-parity family lacks this closure and its full-family sum is
    demonstrably not invariant; the report carries that diagnostic.
    """
    if d > 3:
        raise ValueError("the no-free-lunch check is exhaustive and needs d <= 3")
    params = {"d": d, "seed": seed}

    def body():
        size = 1 << d
        n_fam = 1 << size
        grid = np.arange(n_fam)
        tables = 1.0 - 2.0 * ((grid[:, None] >> np.arange(size)[None, :]) & 1)
        pc = popcounts(d)[np.arange(size)]
        perms = _all_perms(d)
        inv_perms = _invert_perms(perms)

        sums = np.empty(len(perms), dtype=np.int64)
        chunk = max(1, (1 << 22) // (n_fam * size))
        for lo in range(0, len(perms), chunk):
            block = inv_perms[lo : lo + chunk]
            permuted = tables[:, block]  # (family, chunk, size)
            coeffs = _butterfly(permuted.reshape(-1, size))
            degs = np.where(coeffs != 0, pc[None, :], -1).max(axis=1).clip(min=0)
            sums[lo : lo + chunk] = degs.reshape(n_fam, -1).sum(axis=0)

        constant = Fraction(int(sums[0]), n_fam)
        all_equal = bool(np.all(sums == sums[0]))
        identity_degs = np.where(
            _butterfly(tables) != 0, pc[None, :], -1
        ).max(axis=1).clip(min=0)
        identity_value = Fraction(int(identity_degs.sum()), n_fam)

        parity_sums = _batch_mask_values(inv_perms, d, pc.astype(np.int64)).sum(axis=1)
        measured = {
            "transforms": len(perms),
            "family_size": n_fam,
            "objective_constant": constant,
            "identity_objective": identity_value,
            "all_equal": all_equal,
            "matches_identity": constant == identity_value,
            "parity_family_surrogate_constant": bool(
                np.all(parity_sums == parity_sums[0])
            ),
            "parity_family_distinct_sums": len(np.unique(parity_sums)),
        }
        extras = {
            "per_transform": [Fraction(int(s), n_fam) for s in sums.tolist()],
            "perms": perms,
        }
        return measured, all_equal and constant == identity_value, extras

    return _timed("no-free-lunch", params, body)


# ---------------------------------------------------------------------------
# Theorem: low-degree mixtures identify the latents up to signed permutations


def verify_world_model(
    d: int = 3,
    mixture: DegreeMixture | Sequence | None = None,
    mode: str = "exact",
    sample: int = 20000,
    seed: int = 0,
) -> VerificationReport:
    """Argmin of the mixture objective over bijections.

    Exhaustive for d <= 3: passes iff the argmin set is exactly the signed
    permutations (requires p_1 > 0; with p_1 = 0 the check is expected to
    fail, and the measured block records the known extra minimizer).
    Sampled for d in {4, 5}: passes iff no sampled non-degree-1 bijection
    reaches the signed-permutation objective.
    """
    if mixture is None:
        mixture = DegreeMixture.uniform(d)
    elif not isinstance(mixture, DegreeMixture):
        mixture = DegreeMixture(mixture)
    if mixture.d != d:
        raise ValueError("mixture length must equal d")
    params = {
        "d": d,
        "mixture": [str(p) for p in mixture.probs],
        "mode": mode,
        "seed": seed,
    }
    if mode == "sampled":
        params["sample"] = sample

    def body_exhaustive():
        perms = _all_perms(d)
        objectives = _exact_objectives(perms, d, mixture, popcounts(d)[np.arange(1 << d)].astype(np.int64))
        best = min(objectives)
        argmin = {
            tuple(perms[i].tolist()) for i, v in enumerate(objectives) if v == best
        }
        signed = _signed_perm_set(d)
        measured = {
            "transforms": len(perms),
            "minimum_objective": best,
            "argmin_count": len(argmin),
            "signed_permutation_count": len(signed),
            "argmin_is_signed_permutations": argmin == signed,
            "signed_permutations_all_minimal": signed <= argmin,
        }
        if d == 3:
            example = tuple(_example_transform_perm().tolist())
            example_value = objectives[_perm_rank(example)]
            measured["example_transform_objective"] = example_value
            measured["example_transform_in_argmin"] = example_value == best
        extras = {"perms": perms, "per_transform": objectives}
        return measured, measured["argmin_is_signed_permutations"], extras

    def _perm_rank(perm: tuple[int, ...]) -> int:
        # lexicographic rank of a permutation of 0..n-1
        n = len(perm)
        remaining = list(range(n))
        rank = 0
        for i, p in enumerate(perm):
            rank += remaining.index(p) * math.factorial(n - 1 - i)
            remaining.remove(p)
        return rank

    def body_sampled():
        if d not in (4, 5):
            raise ValueError("sampled mode covers d in {4, 5}")
        pc = popcounts(d)[np.arange(1 << d)].astype(np.int64)
        sizes = _family_sizes(d)
        identity_sums = _family_degree_sums(
            _batch_mask_values(np.arange(1 << d)[None, :], d, pc), d
        )[0]
        identity_objective = _objective_from_sums(identity_sums, sizes, mixture)

        signed_perms = np.array(
            [sp.to_bijection().perm for sp in SignedPermutation.enumerate_all(d)]
        )
        signed_objs = _exact_objectives(signed_perms, d, mixture, pc)
        subgroup_ok = all(v == identity_objective for v in signed_objs)

        rng = np.random.default_rng(seed)
        sampled = np.array([rng.permutation(1 << d) for _ in range(sample)])
        sampled_objs = _exact_objectives(sampled, d, mixture, pc)
        # a sampled transform matching the subgroup objective must be degree-1
        bad = 0
        ties = 0
        for perm, value in zip(sampled, sampled_objs):
            if value <= identity_objective:
                ties += 1
                degs = _batch_mask_values(perm[None, :], d, pc)[0]
                singletons = [1 << j for j in range(d)]
                if any(int(degs[s]) != 1 for s in singletons):
                    bad += 1
        measured = {
            "identity_objective": identity_objective,
            "signed_permutations_checked": len(signed_perms),
            "subgroup_all_at_identity_value": subgroup_ok,
            "sampled": sample,
            "sampled_at_or_below_minimum": ties,
            "non_degree_one_minimizers": bad,
        }
        return measured, subgroup_ok and bad == 0, {}

    body = body_exhaustive if mode == "exact" else body_sampled
    if mode == "exact" and d > 3:
        raise ValueError("exact mode is exhaustive and needs d <= 3; use sampled")
    return _timed("world-model", params, body)


# ---------------------------------------------------------------------------
# the d=3 example transform and its d=4 non-extension


def verify_example_counterexample() -> VerificationReport:
    """(a) the (z1, z1*z2, z1*z3) transform preserves the degree-<=k families
    for k in {2, 3} but not k = 1; (b) no sign-valued fourth component
    extends it to a d=4 bijection preserving both families."""
    params = {}

    def body():
        T = CubeBijection(3, _example_transform_perm())
        part_a = preserves_Fk(T, 2) and preserves_Fk(T, 3)
        k1_sanity = not preserves_Fk(T, 1)

        # lift the three components to d = 4 and brute-force the 2^16 candidates
        d = 4
        size = 1 << d
        base = np.zeros(size, dtype=np.int64)
        for i, mask in enumerate((0b0001, 0b0011, 0b0101)):
            bits = popcounts(d)[np.arange(size) & mask] & 1
            base |= bits << i
        candidates = np.arange(1 << size, dtype=np.int64)
        cand_bits = (candidates[:, None] >> np.arange(size)[None, :]) & 1  # (65536, 16)
        outs = base[None, :] | (cand_bits << 3)
        sorted_outs = np.sort(outs, axis=1)
        bijective = np.all(np.diff(sorted_outs, axis=1) > 0, axis=1)
        bijective_count = int(np.sum(bijective))

        pc = popcounts(d)[np.arange(size)].astype(np.int64)
        masks_k2 = np.flatnonzero(pc <= 2)
        masks_k3 = np.flatnonzero(pc <= 3)
        satisfying = 0
        for perm in outs[bijective]:
            degs = _batch_mask_values(perm[None, :], d, pc)[0]
            if np.all(degs[masks_k2] <= 2) and np.all(degs[masks_k3] <= 3):
                satisfying += 1
        measured = {
            "part_a_preserves_k2_k3": bool(part_a),
            "part_a_k1_fails": bool(k1_sanity),
            "candidates": 1 << size,
            "bijective_extensions": bijective_count,
            "satisfying_extensions": satisfying,
        }
        return measured, part_a and k1_sanity and satisfying == 0, {}

    return _timed("example-counterexample", params, body)


# ---------------------------------------------------------------------------
# benefits of the latent route under Hamming-ball training


def _model_with_support(model: GenerationModel, support: SupportSpec) -> GenerationModel:
    return GenerationModel(model.d, model.m, model.components, support)


def _latent_parity_of(labels_by_z: np.ndarray, d: int) -> tuple[int, int] | None:
    """If the full-cube latent labels are exactly a signed parity, return
    (mask, sign); otherwise None."""
    spec = wht(TruthTable(d, labels_by_z))
    masks = spec.support_masks(DegreeTolerance(1e-9))
    if len(masks) != 1:
        return None
    coeff = spec.coeffs[masks[0]]
    if abs(abs(coeff) - 1.0) > 1e-9:
        return None
    return int(masks[0]), (1 if coeff > 0 else -1)


def verify_ood_benefit(
    model: GenerationModel | str = "table1",
    r: int = 2,
    task_terms: Sequence[tuple[Sequence[int], float]] = (((1, 4, 5), 1.0),),
    task_space: str = "x",
    flat_mse_floor: float = 0.5,
) -> VerificationReport:
    """Exact fits on Hamming-ball training data: the flat min-degree solution
    misses the full cube while the latent-route realization is exact.

    The theorem preconditions are evaluated and reported; its MSE > 1
    assertion only applies when they hold.  The default instance checks the
    weaker combinatorial phenomenon (flat MSE above `flat_mse_floor`, latent
    route exact)."""
    if isinstance(model, str):
        model = builtin_model(model)
    params = {
        "model": model.to_json_dict(),
        "r": r,
        "task_terms": [[list(s), c] for s, c in task_terms],
        "task_space": task_space,
        "flat_mse_floor": flat_mse_floor,
    }

    def body():
        d = model.d
        full = (
            model
            if model.support.kind == "full"
            else _model_with_support(model, SupportSpec("full"))
        )
        degenerate = r >= d
        train = full if degenerate else _model_with_support(model, SupportSpec("hamming", r))

        labels_train = SupportedTask.from_terms(train, task_terms, space=task_space).labels
        labels_full = SupportedTask.from_terms(full, task_terms, space=task_space).labels
        z_full, x_full = full.enumerate_support()

        flat = min_degree_solve(SupportedTask(train, labels_train))
        flat_pred = flat.evaluate_indices(x_full)
        flat_mse = float(np.mean((flat_pred - labels_full) ** 2))

        # latent route: unique low-degree latent fit on the ball, composed with
        # the exact inverse representation
        latent_full = np.empty(1 << d)
        latent_full[z_full] = labels_full
        if degenerate:
            latent_mse = 0.0
            g_degree = degree(wht(TruthTable(d, latent_full)))
        else:
            z_train, _ = train.enumerate_support()
            g_spec = hamming_extension(d, r, latent_full[z_train])
            g_values = _butterfly(g_spec.coeffs)
            latent_mse = float(np.mean((g_values[z_full] - latent_full[z_full]) ** 2))
            g_degree = degree(g_spec)

        measured: dict = {
            "flat_degree": flat.degree,
            "flat_full_cube_mse": flat_mse,
            "latent_fit_degree": g_degree,
            "world_model_full_cube_mse": latent_mse,
            "degenerate_full_support": degenerate,
        }

        preconditions = None
        if full.m == full.d and not degenerate:
            # the task degree lives on the data cube, so order by x index
            table_x = np.empty(1 << full.m)
            table_x[x_full] = labels_full
            q = degree(wht(TruthTable(full.m, table_x)))
            parity = _latent_parity_of(latent_full, d)
            ball = int(sum(math.comb(d, i) for i in range(r + 1)))
            cap = math.ceil(math.log2(ball))
            if parity is not None:
                s_size = bin(parity[0]).count("1")
                preconditions = {
                    "q": q,
                    "latent_parity_size": s_size,
                    "degree_cap": cap,
                    "q_exceeds_cap": q > cap,
                    "conditional_degree_high_enough": s_size <= r,
                    "latent_degree_exceeds_gap": s_size > cap - q + r,
                }
                preconditions["all_hold"] = bool(
                    preconditions["q_exceeds_cap"]
                    and preconditions["conditional_degree_high_enough"]
                    and preconditions["latent_degree_exceeds_gap"]
                )
            else:
                preconditions = {"latent_parity": None, "all_hold": False}
        measured["theorem_preconditions"] = preconditions

        if degenerate:
            passed = flat_mse <= 1e-9
        else:
            passed = flat_mse > flat_mse_floor and latent_mse <= 1e-9
            if preconditions and preconditions.get("all_hold"):
                measured["theorem_mse_assertion"] = flat_mse > 1.0
                passed = passed and flat_mse > 1.0
        return measured, passed, {}

    return _timed("ood-benefit", params, body)


def search_ood_configurations(
    seed: int = 0, limit: int = 3, max_random: int = 40
) -> VerificationReport:
    """Search small bijective parity models for instances meeting every
    theorem precondition, then verify flat MSE > 1 and latent-route MSE = 0."""
    params = {"seed": seed, "limit": limit, "max_random": max_random}

    def body():
        hits = []
        checked = 0

        def try_instance(d, r, components, task_subset):
            nonlocal checked
            checked += 1
            try:
                model = GenerationModel(d, d, components)
            except ValueError:
                return None
            report = verify_ood_benefit(
                model, r, ((tuple(task_subset), 1.0),), task_space="z"
            )
            pre = report.measured.get("theorem_preconditions")
            if (
                pre
                and pre.get("all_hold")
                and report.measured["flat_full_cube_mse"] > 1.0
                and report.measured["world_model_full_cube_mse"] <= 1e-9
            ):
                return {
                    "d": d,
                    "r": r,
                    "model": GenerationModel(d, d, components).to_json_dict(),
                    "task_subset": list(task_subset),
                    "flat_full_cube_mse": report.measured["flat_full_cube_mse"],
                    "world_model_full_cube_mse": report.measured["world_model_full_cube_mse"],
                    "preconditions": pre,
                }
            return None

        # structured family: one wide prefix parity, the rest passthrough;
        # the latent task z_1 then needs all q data coordinates at once
        for d in (5, 6):
            for r in (1, 2):
                for q in range(2, d + 1):
                    comps = [ParityComponent(coords_to_mask(range(1, q + 1)))]
                    comps += [ParityComponent(1 << j) for j in range(1, d)]
                    hit = try_instance(d, r, comps, [1])
                    if hit:
                        hits.append(hit)
                    if len(hits) >= limit:
                        break
                if len(hits) >= limit:
                    break
            if len(hits) >= limit:
                break

        # randomized GF(2)-linear bijections for breadth
        rng = np.random.default_rng(seed)
        attempts = 0
        while len(hits) < limit and attempts < max_random:
            attempts += 1
            d = int(rng.choice([5, 6]))
            r = int(rng.choice([1, 2]))
            matrix = rng.integers(0, 2, size=(d, d))
            np.fill_diagonal(matrix, 1)
            comps = [
                ParityComponent(int(sum(1 << j for j in range(d) if matrix[i, j])))
                for i in range(d)
            ]
            subset = [int(rng.integers(1, d + 1))]
            hit = try_instance(d, r, comps, subset)
            if hit:
                hits.append(hit)

        measured = {"instances_found": len(hits), "checked": checked, "instances": hits}
        return measured, len(hits) >= 1, {}

    return _timed("ood-search", params, body)


# ---------------------------------------------------------------------------
# Theorem: basis compatibility shapes the argmin


def _swap_basis(d: int, k_swap: int) -> BasisTransform:
    """Exchange each singleton parity with a distinct size-k_swap parity."""
    pc = popcounts(d)[np.arange(1 << d)]
    big = np.flatnonzero(pc == k_swap)
    if len(big) < d:
        raise ValueError(f"need at least d masks of size {k_swap}")
    pairs = [(1 << j, int(big[j])) for j in range(d)]
    return BasisTransform.parity_swap(d, pairs)


def verify_basis_impact(
    d: int = 3,
    mixture: DegreeMixture | Sequence | None = None,
    k_swap: int = 2,
    compatible: BasisTransform | None = None,
) -> VerificationReport:
    """Compatible bases leave the argmin at the signed permutations; the
    singleton <-> size-k swap forces every argmin transform to carry an
    inverse component of degree >= k_swap."""
    if d > 3:
        raise ValueError("the basis check is exhaustive and needs d <= 3")
    if mixture is None:
        mixture = DegreeMixture([Fraction(1, 2)] + [Fraction(1, 2 * (d - 1))] * (d - 1))
    elif not isinstance(mixture, DegreeMixture):
        mixture = DegreeMixture(mixture)
    if mixture[1] == 0:
        raise ValueError("the construction needs p_1 > 0")
    params = {
        "d": d,
        "mixture": [str(p) for p in mixture.probs],
        "k_swap": k_swap,
        "compatible": None if compatible is None else json.loads(compatible.to_json()),
    }

    def body():
        perms = _all_perms(d)
        inv_perms = _invert_perms(perms)
        pc = popcounts(d)[np.arange(1 << d)].astype(np.int64)
        sizes = _family_sizes(d)
        signed = _signed_perm_set(d)

        U_good = compatible if compatible is not None else BasisTransform.identity(d)
        if not is_compatible(U_good):
            raise ValueError("the supplied basis transform is not compatible")
        cost_good = U_good.inverse_parity_degrees().astype(np.int64)
        values_good = _batch_mask_values(inv_perms, d, cost_good)
        sums_good = _family_degree_sums(values_good, d)
        uniq, inverse = np.unique(sums_good, axis=0, return_inverse=True)
        objs = [_objective_from_sums(row, sizes, mixture) for row in uniq]
        values = [objs[i] for i in inverse]
        best = min(values)
        argmin_good = {tuple(perms[i].tolist()) for i, v in enumerate(values) if v == best}

        U_bad = _swap_basis(d, k_swap)
        cost_bad = U_bad.inverse_parity_degrees().astype(np.int64)
        values_bad = _batch_mask_values(inv_perms, d, cost_bad)
        sums_bad = _family_degree_sums(values_bad, d)
        uniq_b, inverse_b = np.unique(sums_bad, axis=0, return_inverse=True)
        objs_b = [_objective_from_sums(row, sizes, mixture) for row in uniq_b]
        values_b = [objs_b[i] for i in inverse_b]
        best_b = min(values_b)
        argmin_indices = [i for i, v in enumerate(values_b) if v == best_b]

        # max component degree of T^{-1} for each incompatible-basis argmin
        plain_inv_degs = _batch_mask_values(inv_perms[argmin_indices], d, pc)
        singleton_masks = [1 << j for j in range(d)]
        max_inv_component = plain_inv_degs[:, singleton_masks].max(axis=1)
        all_high = bool(np.all(max_inv_component >= k_swap))
        no_signed_argmin = all(
            tuple(perms[i].tolist()) not in signed for i in argmin_indices
        )

        measured = {
            "compatible_argmin_is_signed_permutations": argmin_good == signed,
            "compatible_argmin_count": len(argmin_good),
            "incompatible_argmin_count": len(argmin_indices),
            "incompatible_min_objective": best_b,
            "incompatible_argmin_min_inverse_component_degree": int(max_inv_component.min())
            if argmin_indices
            else None,
            "incompatible_argmin_all_have_high_inverse_component": all_high,
            "incompatible_argmin_excludes_signed_permutations": no_signed_argmin,
        }
        passed = measured["compatible_argmin_is_signed_permutations"] and all_high
        return measured, passed, {}

    return _timed("basis-impact", params, body)


# ---------------------------------------------------------------------------
# the degree-composition inequality behind the identification result


def verify_degree_composition(
    d: int = 3, mode: str = "exact", sample: int = 2000, seed: int = 0
) -> VerificationReport:
    """Family degree sums never shrink under composition with a bijection,
    with equality at k = 1 exactly on the signed permutations."""
    params = {"d": d, "mode": mode, "seed": seed}
    if mode == "sampled":
        params["sample"] = sample

    def body():
        pc = popcounts(d)[np.arange(1 << d)].astype(np.int64)
        if mode == "exact":
            if d > 3:
                raise ValueError("exact mode is exhaustive and needs d <= 3")
            perms = _all_perms(d)
        else:
            rng = np.random.default_rng(seed)
            signed = [sp.to_bijection().perm for sp in SignedPermutation.enumerate_all(d)]
            sampled = [rng.permutation(1 << d) for _ in range(sample)]
            perms = np.array(signed + sampled)
        values = _batch_mask_values(perms, d, pc)
        sums = _family_degree_sums(values, d)
        identity_sums = _family_degree_sums(
            _batch_mask_values(np.arange(1 << d)[None, :], d, pc), d
        )[0]
        violations = int(np.sum(sums < identity_sums[None, :]))
        equality_k1 = sums[:, 0] == identity_sums[0]
        singleton_masks = [1 << j for j in range(d)]
        degree_one = np.all(values[:, singleton_masks] == 1, axis=1)
        iff_holds = bool(np.all(equality_k1 == degree_one))
        measured = {
            "transforms": len(perms),
            "violations": violations,
            "equality_set_size_k1": int(np.sum(equality_k1)),
            "expected_equality_set_size": (1 << d) * math.factorial(d)
            if mode == "exact"
            else None,
            "equality_iff_degree_one": iff_holds,
        }
        passed = violations == 0 and iff_holds
        if mode == "exact":
            passed = passed and measured["equality_set_size_k1"] == (1 << d) * math.factorial(d)
        return measured, passed, {}

    return _timed("degree-composition", params, body)


# ---------------------------------------------------------------------------
# registry used by the command line front end

VERIFIERS = {
    "single-task": verify_single_task,
    "multi-task": verify_multi_task_bound,
    "no-free-lunch": verify_no_free_lunch,
    "world-model": verify_world_model,
    "example-counterexample": verify_example_counterexample,
    "ood-benefit": verify_ood_benefit,
    "ood-search": search_ood_configurations,
    "basis-impact": verify_basis_impact,
    "degree-composition": verify_degree_composition,
}


def run_claim(claim: str, **kwargs) -> VerificationReport:
    if claim not in VERIFIERS:
        raise KeyError(f"unknown claim {claim!r}; have {sorted(VERIFIERS)}")
    return VERIFIERS[claim](**kwargs)
