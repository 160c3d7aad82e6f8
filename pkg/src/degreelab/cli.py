"""Command-line front end: leaf spectral operations, claim verification,
and deterministic parameter sweeps.

Exit codes: 0 success (claim passed), 1 verification failure, 2 usage or
configuration error.  Machine output is canonical JSON on stdout or --out;
wall-clock timing goes to stderr so repeated runs stay byte-identical.
The DEGREELAB_OUT_DIR environment variable prefixes relative --out paths.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .boolfn import (
    DegreeTolerance,
    FourierSpectrum,
    TruthTable,
    degree,
    flip_influence,
    influence,
    mask_to_coords,
    wht,
)
from .genmodel import BUILTIN_MODELS, GenerationModel, builtin_model
from .minsolve import SupportedTask, min_degree_solve
from .tasks import DegreeMixture, ParityFamily, RandomPolynomialFamily, sample_task
from .theoremlab import VERIFIERS, objective, run_claim
from .transforms import CubeBijection

USAGE_ERROR = 2


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 2."""


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")


def _load_model(ref: str) -> GenerationModel:
    if ref in BUILTIN_MODELS:
        return builtin_model(ref)
    return GenerationModel.from_json_dict(_load_json(ref), check=False)


def _resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get("DEGREELAB_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, out: str | None) -> None:
    target = _resolve_out(out)
    if target is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(target, "w") as fh:
            fh.write(text)


def _canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


def _kv_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# leaf commands


def _cmd_wht(args) -> int:
    table = TruthTable.from_json(json.dumps(_load_json(args.table)))
    spec = wht(table)
    if args.format == "csv":
        rows = [("mask", "coords", "coeff")]
        rows += [
            (S, " ".join(map(str, mask_to_coords(S))), repr(float(c)))
            for S, c in enumerate(spec.coeffs)
        ]
        _emit(_kv_csv(rows), args.out)
    else:
        _emit(_canonical_json(json.loads(spec.to_json())), args.out)
    return 0


def _cmd_degree(args) -> int:
    tol = DegreeTolerance(args.eps)
    if args.spectrum:
        spec = FourierSpectrum.from_json(json.dumps(_load_json(args.spectrum)))
    else:
        spec = wht(TruthTable.from_json(json.dumps(_load_json(args.table))))
    result = {"degree": degree(spec, tol), "eps": args.eps}
    if args.format == "csv":
        _emit(_kv_csv([("key", "value")] + sorted(result.items())), args.out)
    else:
        _emit(_canonical_json(result), args.out)
    return 0


def _cmd_influence(args) -> int:
    table = TruthTable.from_json(json.dumps(_load_json(args.table)))
    result = {"coordinate": args.coordinate, "influence": influence(table, args.coordinate)}
    if table.is_sign_valued():
        result["flip_influence"] = flip_influence(table, args.coordinate)
    if args.format == "csv":
        _emit(_kv_csv([("key", "value")] + sorted(result.items())), args.out)
    else:
        _emit(_canonical_json(result), args.out)
    return 0


def _cmd_minsolve(args) -> int:
    data = _load_json(args.task)
    model = _load_model(args.model) if args.model else None
    task = SupportedTask.from_json_dict(data, model)
    solution = min_degree_solve(task)
    payload = solution.to_json_dict()
    if args.format == "csv":
        rows = [("mask", "coords", "coeff")]
        rows += [
            (int(S), " ".join(map(str, mask_to_coords(int(S)))), repr(float(solution.spectrum.coeffs[S])))
            for S in solution.spectrum.support_masks()
        ]
        _emit(_kv_csv(rows), args.out)
    else:
        _emit(_canonical_json(payload), args.out)
    return 0


def _support_sha256(model: GenerationModel) -> str:
    z, x = model.enumerate_support()
    digest = hashlib.sha256()
    for zi, xi in zip(z.tolist(), x.tolist()):
        digest.update(f"{zi}:{xi};".encode())
    return digest.hexdigest()


def _cmd_model_validate(args) -> int:
    model = _load_model(args.model)
    report = model.validate()
    payload = {
        "model": model.to_json_dict(),
        "validation": report.to_json_dict(),
        "support_sha256": _support_sha256(model),
    }
    _emit(_canonical_json(payload), args.out)
    return 0 if report.injective else 1


def _cmd_sample_tasks(args) -> int:
    model = _load_model(args.model)
    if args.family == "parity":
        family = ParityFamily(model, args.k)
    else:
        family = RandomPolynomialFamily(model, args.k)
    rng = np.random.default_rng(args.seed)
    model_hash = hashlib.sha256(model.to_json().encode()).hexdigest()[:16]
    tasks = []
    for i in range(args.count):
        task = sample_task(family, rng)
        tasks.append({"index": i, "labels": task.labels.tolist()})
    payload = {
        "model_ref": args.model,
        "model_sha256_16": model_hash,
        "family": {"kind": args.family, "k": args.k},
        "seed": args.seed,
        "tasks": tasks,
    }
    _emit(_canonical_json(payload), args.out)
    return 0


def _cmd_objective(args) -> int:
    if args.transform == "identity":
        T = CubeBijection.identity(args.d)
    elif args.transform == "example":
        from .theoremlab import _example_transform_perm

        if args.d != 3:
            raise CliError("the example transform lives at d=3")
        T = CubeBijection(3, _example_transform_perm())
    else:
        data = _load_json(args.transform)
        T = CubeBijection(int(data["d"]), data["perm"])
        if T.d != args.d:
            raise CliError(f"transform dimension {T.d} does not match --d {args.d}")
    weights = "uniform-full" if args.uniform_full else DegreeMixture.parse(args.mixture)
    evaluation = objective(T, weights, mode=args.mode, seed=args.seed)
    _emit(_canonical_json(evaluation.to_json_dict()), args.out)
    return 0


# ---------------------------------------------------------------------------
# verify


def _mixture_arg(text: str) -> DegreeMixture:
    try:
        return DegreeMixture.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad mixture {text!r}: {exc}")


def _verify_kwargs(args) -> dict:
    claim = args.claim
    kw = {}
    if claim == "single-task":
        kw = {"d": args.d, "trials": args.trials, "seed": args.seed}
        if args.model:
            kw["model"] = _load_model(args.model)
    elif claim == "multi-task":
        kw = {
            "d": args.d,
            "n_tasks": args.n_tasks,
            "batches": args.batches,
            "k": args.k,
            "phi": args.phi,
            "seed": args.seed,
        }
        if args.model:
            kw["model"] = _load_model(args.model)
    elif claim == "no-free-lunch":
        kw = {"d": args.d, "seed": args.seed}
    elif claim == "world-model":
        kw = {"d": args.d, "mode": args.mode, "seed": args.seed, "sample": args.sample}
        if args.mixture:
            kw["mixture"] = _mixture_arg(args.mixture)
    elif claim == "example-counterexample":
        kw = {}
    elif claim == "ood-benefit":
        kw = {"r": args.r}
        if args.model:
            kw["model"] = _load_model(args.model)
        if args.task:
            data = _load_json(args.task)
            kw["task_terms"] = [
                (tuple(t["subset"]), float(t.get("coeff", t.get("sign", 1))))
                for t in data["expr"]
            ]
            kw["task_space"] = data.get("space", "x")
        elif args.task_terms:
            subset = tuple(int(c) for c in args.task_terms.split(","))
            kw["task_terms"] = ((subset, 1.0),)
            kw["task_space"] = args.task_space
    elif claim == "ood-search":
        kw = {"seed": args.seed, "limit": args.limit}
    elif claim == "basis-impact":
        kw = {"d": args.d, "k_swap": args.k_swap}
        if args.mixture:
            kw["mixture"] = _mixture_arg(args.mixture)
    elif claim == "degree-composition":
        kw = {"d": args.d, "mode": args.mode, "seed": args.seed, "sample": args.sample}
    return kw


def _cmd_verify(args) -> int:
    try:
        report = run_claim(args.claim, **_verify_kwargs(args))
    except (ValueError, KeyError) as exc:
        raise CliError(str(exc))
    _emit(report.to_json(), args.out)
    print(f"# {args.claim}: runtime {report.runtime_seconds:.3f}s", file=sys.stderr)
    if args.csv and "per_transform" in report.extras:
        rows = [("transform_index", "perm", "objective")]
        perms = report.extras["perms"]
        for i, value in enumerate(report.extras["per_transform"]):
            rows.append((i, " ".join(map(str, perms[i].tolist())), str(value)))
        with open(_resolve_out(args.csv), "w") as fh:
            fh.write(_kv_csv(rows))
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# sweep

_SWEEP_KEYS = {"claim", "grid", "fixed", "seed", "out"}


def _sweep_cells(config: dict) -> list[dict]:
    grid = config.get("grid", {})
    if not isinstance(grid, dict):
        raise CliError("config field 'grid' must be an object")
    names = sorted(grid)
    cells: list[dict] = []
    if not names:
        return cells
    counts = [len(grid[n]) for n in names]
    if any(c == 0 for c in counts):
        return cells
    total = int(np.prod(counts))
    for index in range(total):
        cell = {}
        rem = index
        for name, count in zip(names, counts):
            cell[name] = grid[name][rem % count]
            rem //= count
        cells.append(cell)
    return cells


def _sweep_worker(payload: tuple) -> tuple[int, dict]:
    index, claim, kwargs, mixture_text = payload
    if mixture_text is not None:
        kwargs = dict(kwargs)
        kwargs["mixture"] = DegreeMixture.parse(mixture_text)
    try:
        report = run_claim(claim, **kwargs)
        flat = {"passed": report.passed, "error": ""}
        for key, value in report.to_json_dict()["measured"].items():
            if isinstance(value, (int, float, bool, str)) or value is None:
                flat[f"measured.{key}"] = value
        return index, flat
    except Exception as exc:  # per-row failures recorded, sweep continues
        return index, {"passed": False, "error": f"{type(exc).__name__}: {exc}"}


def _cmd_sweep(args) -> int:
    config = _load_json(args.config)
    unknown = set(config) - _SWEEP_KEYS
    if unknown:
        raise CliError(f"unknown config fields: {sorted(unknown)}")
    if "claim" not in config:
        raise CliError("config field 'claim' is required")
    claim = config["claim"]
    if claim not in VERIFIERS:
        raise CliError(f"unknown claim {claim!r}; have {sorted(VERIFIERS)}")
    if "seed" not in config:
        raise CliError("config field 'seed' is required")
    base_seed = int(config["seed"])
    fixed = config.get("fixed", {})
    cells = _sweep_cells(config)

    jobs = []
    for index, cell in enumerate(cells):
        kwargs = dict(fixed)
        kwargs.update(cell)
        mixture_text = kwargs.pop("mixture", None)
        if "seed" not in kwargs:
            kwargs["seed"] = int(
                np.random.SeedSequence([base_seed, index]).generate_state(1)[0]
            )
        jobs.append((index, claim, kwargs, mixture_text))

    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = dict(pool.map(_sweep_worker, jobs))
    else:
        results = dict(map(_sweep_worker, jobs))

    param_names = sorted({name for cell in cells for name in cell})
    metric_names = sorted(
        {key for row in results.values() for key in row if key not in ("passed", "error")}
    )
    header = ["cell", "claim", *param_names, "passed", "error", *metric_names]
    rows = [tuple(header)]
    for index, cell in enumerate(cells):
        row = results[index]
        rows.append(
            (
                index,
                claim,
                *[json.dumps(cell.get(n)) for n in param_names],
                row.get("passed"),
                row.get("error", ""),
                *[
                    repr(row[m]) if isinstance(row.get(m), float) else row.get(m, "")
                    for m in metric_names
                ],
            )
        )
    _emit(_kv_csv(rows), args.out or config.get("out"))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degreelab",
        description="Boolean-cube spectral analysis, min-degree solving, and claim verification",
    )
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="parallelism cap for sweeps (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(p):
        p.add_argument("--out", "-o", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("wht", help="transform a truth table to its spectrum")
    p.add_argument("--table", required=True)
    leaf(p)
    p.set_defaults(func=_cmd_wht)

    p = sub.add_parser("degree", help="degree of a table or spectrum")
    p.add_argument("--table")
    p.add_argument("--spectrum")
    p.add_argument("--eps", type=float, default=1e-9)
    leaf(p)
    p.set_defaults(func=_cmd_degree)

    p = sub.add_parser("influence", help="influence of one coordinate")
    p.add_argument("--table", required=True)
    p.add_argument("--coordinate", type=int, required=True)
    leaf(p)
    p.set_defaults(func=_cmd_influence)

    p = sub.add_parser("minsolve", help="minimum-degree fit of a task file")
    p.add_argument("--task", required=True)
    p.add_argument("--model", help="model name or file overriding the task's model")
    leaf(p)
    p.set_defaults(func=_cmd_minsolve)

    p = sub.add_parser("model-validate", help="injectivity and degree report")
    p.add_argument("--model", required=True, help=f"file or one of {BUILTIN_MODELS}")
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_model_validate)

    p = sub.add_parser("sample-tasks", help="draw tasks from a family")
    p.add_argument("--model", required=True)
    p.add_argument("--family", choices=("parity", "poly"), default="parity")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_sample_tasks)

    p = sub.add_parser("objective", help="expected realization degree of a transform")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--transform", default="identity", help="file, 'identity', or 'example'")
    p.add_argument("--mixture", help="comma-separated degree weights")
    p.add_argument("--uniform-full", action="store_true")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--seed", type=int)
    leaf(p)
    p.set_defaults(func=_cmd_objective)

    p = sub.add_parser("verify", help="run one claim verifier")
    p.add_argument("claim", choices=sorted(VERIFIERS))
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--model")
    p.add_argument("--mixture")
    p.add_argument("--mode", default=None)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--n-tasks", type=int, default=64)
    p.add_argument("--batches", type=int, default=1)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--k-swap", type=int, default=2)
    p.add_argument("--phi", choices=("inverse", "signed", "random"), default="inverse")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--task", help="task JSON with an expr block")
    p.add_argument("--task-terms", help="comma-separated subset, coefficient 1")
    p.add_argument("--task-space", choices=("x", "z"), default="x")
    p.add_argument("--sample", type=int, default=2000)
    p.add_argument("--limit", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also write per-transform objective values")
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="grid of verifier runs to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    # claim-dependent default for --mode
    if getattr(args, "command", None) == "verify" and args.mode is None:
        args.mode = "exact"
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
