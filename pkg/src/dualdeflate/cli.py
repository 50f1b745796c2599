"""Command-line front end.

Subcommands: multiplicity, predict-order, deflate, solve, matrix.
Reports go to stdout (text or JSON), diagnostics to stderr. Exit codes:
0 success, 1 parse error, 2 numerical failure, 3 dimension mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .deflate import (
    deflate_first_order,
    deflate_higher_order,
    deflation_matrix,
    predict_order,
    truncated_deflation_matrix,
)
from .dual import dual_space_dz, dual_space_st
from .errors import DimensionMismatchError, DualDeflateError, ParseError
from .parsing import parse_point, parse_system, serialize_system
from .solver import DriverConfig, NewtonOptions, deflation_driver

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NUMERICAL = 2
EXIT_DIMENSION = 3


def _cnum(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _common_flags(p: argparse.ArgumentParser, point: bool = True):
    p.add_argument("system", help="system file ('-' for stdin)")
    if point:
        p.add_argument("point", help="point file")
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dualdeflate",
        description="Multiplicity structure and deflation of singular polynomial roots",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("multiplicity", help="dual-space multiplicity at a point")
    _common_flags(p)
    p.add_argument("--method", choices=("dz", "st"), default="dz")
    p.add_argument("--max-degree", type=int, default=16)

    p = sub.add_parser("predict-order", help="predict the deflation order")
    _common_flags(p)
    p.add_argument("--tol-coeff", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("deflate", help="one deflation step")
    _common_flags(p)
    p.add_argument("--order", default="auto", help="auto, first, or an integer")
    p.add_argument("--tol-coeff", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="deflate until regular, then refine")
    _common_flags(p)
    p.add_argument("--order", default="auto", help="auto, first, or an integer")
    p.add_argument("--tol-coeff", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-stages", type=int, default=10)

    p = sub.add_parser("matrix", help="symbolic derivative-matrix dump")
    _common_flags(p, point=False)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--truncated", action="store_true")
    p.add_argument(
        "--rows", choices=("original", "multiples"), default="original",
        help="row set for --truncated",
    )

    return ap


def _parse_order(text: str):
    if text in ("auto", "first"):
        return text
    try:
        return int(text)
    except ValueError:
        raise SystemExit(f"invalid --order value {text!r}")


def _emit(report: dict, fmt: str, timings: dict):
    report["timings"] = timings
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_text(report)


def _print_text(report: dict, indent: int = 0):
    pad = "  " * indent
    for key, value in report.items():
        if key in ("schema_version",):
            continue
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_text(value, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:")
            for item in value:
                print(f"{pad}  -")
                _print_text(item, indent + 2)
        else:
            print(f"{pad}{key}: {value}")


def _run_multiplicity(args, report):
    F = parse_system(_read(args.system))
    x0 = parse_point(_read(args.point), F)
    fn = dual_space_dz if args.method == "dz" else dual_space_st
    result = fn(F, x0, tol=args.tol_rank, max_d=args.max_degree)
    report.update(
        method=result.method,
        multiplicity=result.multiplicity,
        degree=result.dual_basis.degree,
        per_degree_dims=list(result.dual_basis.per_degree_dims),
        initial_support=sorted(map(list, result.initial_support)),
        standard_monomials=sorted(map(list, result.standard_monomials)),
    )
    return EXIT_OK


def _run_predict_order(args, report):
    F = parse_system(_read(args.system))
    x0 = parse_point(_read(args.point), F)
    rng = np.random.default_rng(args.seed)
    pred = predict_order(F, x0, args.tol_rank, args.tol_coeff, rng)
    report.update(order=pred.d, support_degrees=sorted(pred.support_degrees))
    return EXIT_OK


def _augmented_report(aug):
    return {
        "kind": aug.kind,
        "order": aug.order,
        "stage": aug.stage,
        "multiplier_count": aug.multiplier_count,
        "equations": aug.system.nequations,
        "variables": aug.system.nvars,
        "system": serialize_system(aug.system),
        "lambda_estimate": (
            None
            if aug.lambda_estimate is None
            else [_cnum(z) for z in aug.lambda_estimate]
        ),
    }


def _run_deflate(args, report):
    F = parse_system(_read(args.system))
    x0 = parse_point(_read(args.point), F)
    rng = np.random.default_rng(args.seed)
    policy = _parse_order(args.order)
    if policy == "first":
        d = 1
    elif policy == "auto":
        d = predict_order(F, x0, args.tol_rank, args.tol_coeff, rng).d
    else:
        d = policy
    if d <= 1:
        aug = deflate_first_order(F, x0, args.tol_rank, rng)
    else:
        aug = deflate_higher_order(F, d, x0, args.tol_rank, rng)
    report.update(_augmented_report(aug))
    return EXIT_OK


def _run_solve(args, report):
    F = parse_system(_read(args.system))
    x0 = parse_point(_read(args.point), F)
    config = DriverConfig(
        order_policy=_parse_order(args.order),
        tol_rank=args.tol_rank,
        tol_coeff=args.tol_coeff,
        max_stages=args.max_stages,
        seed=args.seed,
        newton=NewtonOptions(tol_rank=args.tol_rank),
    )
    result = deflation_driver(F, x0, config)
    residual = float(np.linalg.norm(F.evaluate(result.refined_point)))
    report.update(
        final_regular=result.final_regular,
        stages=[_augmented_report(s) for s in result.stages],
        stage_count=result.stage_count,
        per_stage_rank=[
            {"rank": r.rank, "corank": r.corank} for r in result.per_stage_rank
        ],
        refined_point=[_cnum(z) for z in result.refined_point],
        extended_point=[_cnum(z) for z in result.extended_point],
        residual=residual,
        iterations=[len(t.iterates) - 1 for t in result.traces],
    )
    return EXIT_OK if result.final_regular else EXIT_NUMERICAL


def _run_matrix(args, report):
    F = parse_system(_read(args.system))
    if args.truncated:
        M = truncated_deflation_matrix(F, args.order, rows=args.rows)
    else:
        M = deflation_matrix(F, args.order)
    report.update(
        rows=M.shape[0],
        cols=M.shape[1],
        row_labels=[[list(alpha), j] for alpha, j in M.row_labels],
        col_labels=[list(b) for b in M.col_labels],
        entries=[[e.to_string(F.var_names) for e in row] for row in M.entries],
    )
    return EXIT_OK


_RUNNERS = {
    "multiplicity": _run_multiplicity,
    "predict-order": _run_predict_order,
    "deflate": _run_deflate,
    "solve": _run_solve,
    "matrix": _run_matrix,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report: dict = {"schema_version": SCHEMA_VERSION, "command": args.command}
    report["tolerances"] = {"tol_rank": args.tol_rank}
    for name in ("tol_coeff",):
        if hasattr(args, name):
            report["tolerances"][name] = getattr(args, name)
    if hasattr(args, "seed"):
        report["seed"] = args.seed
    start = time.perf_counter()
    try:
        code = _RUNNERS[args.command](args, report)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (DualDeflateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    timings = {"total_seconds": time.perf_counter() - start}
    _emit(report, args.format, timings)
    return code


if __name__ == "__main__":
    sys.exit(main())
