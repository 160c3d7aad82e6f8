"""Command line for the neural-network phenomena runs.

Reads model JSON written by the companion `degreelab` CLI (either raw
model documents or `model-validate` reports) and writes metrics CSV in the
same style as its sweep output: one header row, one row per unit of work,
deterministic column order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .boolean_bias import run_boolean_bias
from .data import BooleanModel
from .extrapolation import run_extrapolation
from .models import MixedActivationMLPSpec
from .multitask import run_multitask_probe


def _write_csv(rows: list[dict], out: str | None) -> None:
    if not rows:
        text = ""
    else:
        columns = sorted({key for row in rows for key in row})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_terms(args) -> list:
    if args.task:
        with open(args.task) as fh:
            doc = json.load(fh)
        space = doc.get("space", "x")
        return [
            (t["subset"], float(t.get("coeff", t.get("sign", 1))), t.get("space", space))
            for t in doc["expr"]
        ]
    subset = [int(c) for c in args.task_terms.split(",")]
    return [(subset, 1.0, args.task_space)]


def _cmd_extrapolation(args) -> int:
    spec = MixedActivationMLPSpec(
        depth=args.depth,
        width=args.width,
        fractions=(args.relu_fraction, args.identity_fraction, args.square_fraction),
    )
    result = run_extrapolation(
        spec,
        degree=args.degree,
        n_polys=args.n_polys,
        seed=args.seed,
        epochs=args.epochs,
    )
    rows = [
        {k: v for k, v in row.items() if k != "coeffs"} for row in result["rows"]
    ]
    _write_csv(rows, args.out)
    print(json.dumps(result["summary"], sort_keys=True), file=sys.stderr)
    return 0 if result["summary"]["mixed_below_relu"] else 1


def _cmd_boolean_bias(args) -> int:
    model = BooleanModel.from_file(args.model)
    r = None if args.r is None or args.r >= model.d else args.r
    result = run_boolean_bias(
        model,
        _load_terms(args),
        r=r,
        seed=args.seed,
        oracle=args.oracle,
        epochs=args.epochs,
    )
    _write_csv([result], args.out)
    return 0


def _cmd_multitask(args) -> int:
    model = BooleanModel.from_file(args.model)
    rows = []
    for n_tasks in args.n_tasks:
        rows.append(
            run_multitask_probe(
                model, k=args.k, n_tasks=n_tasks, seed=args.seed, epochs=args.epochs
            )
        )
    _write_csv(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnlab", description="neural-network runs for the low-degree phenomena"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extrapolation", help="ReLU vs mixed activations on polynomials")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--n-polys", type=int, default=20)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--relu-fraction", type=float, default=0.5)
    p.add_argument("--identity-fraction", type=float, default=0.25)
    p.add_argument("--square-fraction", type=float, default=0.25)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_extrapolation)

    p = sub.add_parser("boolean-bias", help="Hamming-ball training, full-cube evaluation")
    p.add_argument("--model", required=True, help="model JSON or model-validate report")
    p.add_argument("--task", help="task JSON with an expr block")
    p.add_argument("--task-terms", default="1,4,5", help="comma-separated subset")
    p.add_argument("--task-space", choices=("x", "z"), default="x")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--oracle", action="store_true", help="train on true latents")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_boolean_bias)

    p = sub.add_parser("multitask-probe", help="shared trunk, latent-recovery probe")
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n-tasks", type=int, nargs="+", default=[1, 64])
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=_cmd_multitask)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
