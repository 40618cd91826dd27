"""Command-line interface: ``mean``, ``verify``, and ``bench`` subcommands.

Exit codes: 0 success, 1 usage/IO/config errors, 2 validation failures
(inadmissible configuration or a failed verification suite), 3 solver
failures (no convergence, step failure, nonsmooth collision).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bench import run_bench, write_bench_csv
from .config import load_run_config
from .dataio import (
    emit_trace,
    load_dataset,
    save_center_result,
    save_trace_json,
    write_json,
)
from .descent import StopCriteria
from .errors import (
    GeodescentError,
    InvariantViolation,
    ParseError,
    SingularIterate,
    StepFailure,
    ValidationFailure,
)
from .frechet import (
    MassProblem,
    admissible_radius_bound,
    auto_constant_rule,
    center_of_mass,
)
from .stepsize import ArmijoRule, ConstantRule
from .verify import run_inequality_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _fail(message: str, code: int) -> int:
    print(f"geodescent: {message}", file=sys.stderr)
    return code


def _auto_anchor(data):
    """Data point minimizing the maximum distance to the others (1-center)."""
    man = data.manifold
    best, best_val = data.points[0], math.inf
    for candidate in data.points:
        val = max(man.dist(candidate, y) for y in data.points)
        if val < best_val:
            best, best_val = candidate, val
    return best


def _resolve_problem(cfg):
    data = load_dataset(cfg.dataset)
    man = data.manifold

    anchor = _auto_anchor(data) if cfg.anchor == "auto" else man.point(cfg.anchor)

    if cfg.radius == "auto":
        bounds = man.curvature_bounds()
        r_inj = man.injectivity_radius()
        if bounds.kappa_hi <= 0.0 and math.isinf(r_inj):
            radius = math.inf
        else:
            radius = admissible_radius_bound(cfg.p, 1.0, bounds, r_inj)
    else:
        radius = float(cfg.radius)

    problem = MassProblem(data, cfg.p, anchor, radius)
    x0 = None if cfg.x0 == "anchor" else man.point(cfg.x0)
    return problem, x0


def cmd_mean(args) -> int:
    overrides = {
        "p": args.p,
        "rule": args.rule,
        "beta": args.beta,
        "t0": args.t0,
        "seed": args.seed,
        "out": args.out,
    }
    try:
        cfg = load_run_config(args.config, overrides)
        problem, x0 = _resolve_problem(cfg)
    except (OSError, ParseError, InvariantViolation, GeodescentError) as e:
        return _fail(str(e), EXIT_USAGE)

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = x0 if x0 is not None else problem.anchor
    if cfg.rule == "armijo":
        rule = ArmijoRule(beta=cfg.beta, max_halvings=cfg.max_halvings)
    else:
        if cfg.t0 == "auto":
            rule = auto_constant_rule(problem, start, seed=cfg.seed)
        else:
            rule = ConstantRule(float(cfg.t0))
    stop = StopCriteria(
        grad_tol=cfg.grad_tol, max_iters=cfg.max_iters, point_tol=cfg.point_tol
    )

    try:
        result = center_of_mass(problem, x0, rule, stop)
    except ValidationFailure as e:
        write_json(e.report.to_dict(), out_dir / "validation.json")
        return _fail(f"validation failed: {e}", EXIT_VALIDATION)
    except (SingularIterate, StepFailure) as e:
        if e.trace is not None:
            emit_trace(e.trace, out_dir / "trace.csv")
            save_trace_json(e.trace, out_dir / "trace.json")
        return _fail(f"solver failed: {e}", EXIT_SOLVER)

    save_center_result(result, out_dir / "result.json")
    emit_trace(result.trace, out_dir / "trace.csv")
    save_trace_json(result.trace, out_dir / "trace.json")
    if not result.converged:
        return _fail(
            f"run stopped with status {result.trace.status.value}", EXIT_SOLVER
        )
    print(json.dumps({"center": result.center.coords.tolist(),
                      "value": result.trace.final_value,
                      "iterations": result.trace.n_transitions}))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_inequality_suite(samples=args.samples, seed=args.seed)
    payload = report.to_dict()
    print(json.dumps(payload, sort_keys=True, indent=2))
    if args.out:
        write_json(payload, args.out)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_bench(args) -> int:
    try:
        cfg = load_run_config(args.config, {})
    except (OSError, ParseError, InvariantViolation) as e:
        return _fail(str(e), EXIT_USAGE)
    if not cfg.bench_sizes or not cfg.bench_manifolds or not cfg.bench_p_values:
        return _fail("bench config lists no fixtures", EXIT_USAGE)
    try:
        rows = run_bench(
            cfg.bench_manifolds, cfg.bench_p_values, cfg.bench_sizes, seed=cfg.seed
        )
    except GeodescentError as e:
        return _fail(str(e), EXIT_USAGE)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "bench.csv"
    write_bench_csv(rows, out_path)
    print(f"wrote {len(rows)} rows to {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodescent",
        description="Geodesic gradient descent and centers of mass on manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mean = sub.add_parser("mean", help="compute a weighted L^p center of mass")
    mean.add_argument("--config", required=True)
    mean.add_argument("--p", type=float, default=None)
    mean.add_argument("--rule", choices=["armijo", "constant"], default=None)
    mean.add_argument("--beta", type=float, default=None)
    mean.add_argument("--t0", default=None)
    mean.add_argument("--seed", type=int, default=None)
    mean.add_argument("--out", default=None)
    mean.set_defaults(func=cmd_mean)

    verify = sub.add_parser("verify", help="run the inequality verification suite")
    verify.add_argument("--samples", type=int, default=10_000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="benchmark step rules on random fixtures")
    bench.add_argument("--config", required=True)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage problems and 0 for --help
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
