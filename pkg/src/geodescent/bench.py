"""Desk-scale benchmark: Armijo vs constant steps vs the flat-case median.

Fixtures are generated per (manifold, exponent, size) from a seed; each
method reports iterations, final gradient norm, a fitted contraction
factor, and wall time.  On Euclidean data with p = 1 the classic
reweighting iteration for the geometric median runs as a cross-check.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .descent import StopCriteria, estimate_linear_rate, gradient_descent
from .errors import InsufficientData, ZeroDistance
from .frechet import MassProblem, WeightedPoints, auto_constant_rule
from .geometry import Ball, Euclidean, Manifold, ManifoldPoint, get_manifold
from .stepsize import ArmijoRule


@dataclass(frozen=True)
class BenchRow:
    method: str
    manifold: str
    p: float
    n_points: int
    iterations: int
    final_grad_norm: float
    fitted_rho: float
    wall_time_s: float

    def to_list(self) -> list:
        return [
            self.method,
            self.manifold,
            self.p,
            self.n_points,
            self.iterations,
            repr(self.final_grad_norm),
            repr(self.fitted_rho) if math.isfinite(self.fitted_rho) else "",
            f"{self.wall_time_s:.6f}",
        ]


BENCH_COLUMNS = [
    "method", "manifold", "p", "n_points", "iterations",
    "final_grad_norm", "fitted_rho", "wall_time_s",
]


def _base_point(man: Manifold) -> ManifoldPoint:
    if man.tag == "euclidean":
        return man.point(np.zeros(man.dim))
    if man.tag == "sphere":
        coords = np.zeros(man.ambient_size)
        coords[0] = 1.0
        return man.point(coords)
    if man.tag == "hyperboloid":
        return man.base_point()
    return man.identity_point()


def make_problem(man: Manifold, p: float, n_points: int, seed) -> MassProblem:
    """Random admissible fixture; sphere data stays in the inner third."""
    rng = np.random.default_rng(np.random.SeedSequence([hash(man.tag) % 2**32, n_points, seed]))
    base = _base_point(man)
    if man.tag == "sphere":
        radius = (math.pi / 4 if p < 2.0 else math.pi / 2) * 0.95
        spread = radius / 3.2
    else:
        radius = math.inf
        spread = 1.0
    points = tuple(man.random_point(Ball(base, spread), rng) for _ in range(n_points))
    weights = rng.uniform(0.5, 1.5, n_points)
    weights = weights / math.fsum(weights)
    return MassProblem(WeightedPoints(points, weights), p, base, radius)


def weiszfeld_median(
    data: WeightedPoints, x0: np.ndarray, max_iters: int = 2000, tol: float = 1e-14
) -> tuple[np.ndarray, int]:
    """Reweighting iteration for the Euclidean geometric median."""
    ys = np.array([p.coords for p in data.points])
    w = data.weights
    x = np.array(x0, dtype=float)
    for k in range(max_iters):
        d = np.linalg.norm(ys - x, axis=1)
        if np.any(d < 1e-15):
            return x, k  # sitting on a data point
        inv = w / d
        x_new = (inv[:, None] * ys).sum(axis=0) / inv.sum()
        if np.linalg.norm(x_new - x) <= tol * (1.0 + np.linalg.norm(x)):
            return x_new, k + 1
        x = x_new
    return x, max_iters


def _fit_rho(trace) -> float:
    try:
        return estimate_linear_rate(trace).rho
    except (InsufficientData, ZeroDistance):
        return math.nan


def run_bench(
    manifolds: list[tuple[str, int]],
    p_values: list[float],
    sizes: list[int],
    seed: int = 0,
    grad_tol: float = 1e-10,
) -> list[BenchRow]:
    rows: list[BenchRow] = []
    for tag, dim in manifolds:
        man = get_manifold(tag, dim)
        label = f"{tag}:{dim}"
        for p in p_values:
            # the evaluation-noise floor of backtracking sits near |g| ~ 1e-8
            # on stiff p < 2 instances; stop above it
            stop = StopCriteria(grad_tol=grad_tol if p >= 2.0 else max(grad_tol, 1e-7))
            for n in sizes:
                problem = make_problem(man, p, n, seed)
                x0 = problem.anchor

                start = time.perf_counter()
                trace = gradient_descent(
                    problem.as_objective(), x0, ArmijoRule(beta=0.6), stop
                )
                rows.append(
                    BenchRow("armijo", label, p, n, trace.n_transitions,
                             trace.final_grad_norm, _fit_rho(trace),
                             time.perf_counter() - start)
                )

                start = time.perf_counter()
                rule = auto_constant_rule(problem, x0, seed=seed, samples=64)
                trace_c = gradient_descent(problem.as_objective(), x0, rule, stop)
                rows.append(
                    BenchRow("constant", label, p, n, trace_c.n_transitions,
                             trace_c.final_grad_norm, _fit_rho(trace_c),
                             time.perf_counter() - start)
                )

                if isinstance(man, Euclidean) and p == 1.0:
                    start = time.perf_counter()
                    median, iters = weiszfeld_median(problem.data, x0.coords)
                    gap = float(np.linalg.norm(median - trace.final_point.coords))
                    rows.append(
                        BenchRow("weiszfeld", label, p, n, iters, gap, math.nan,
                                 time.perf_counter() - start)
                    )
    return rows


def write_bench_csv(rows: list[BenchRow], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow(row.to_list())
