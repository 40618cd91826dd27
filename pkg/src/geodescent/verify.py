"""Numerical verification of the comparison inequalities behind the solver.

On hyperbolic space (curvature exactly -1) with the convex squared-distance
cost, three inequalities tie the distance from a gradient-step point to any
reference point back to pre-step quantities.  They are theorems, not
statistics: a single violation beyond slack indicates a geometry or
gradient bug, so the suite reports zero-violation counts rather than
averages.  A sequence-growth lemma and the quasi-Fejer inequality along an
actual descent run are exercised as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import tanh_ratio
from .descent import StopCriteria, gradient_descent, quasi_fejer_margins
from .frechet import MassProblem, WeightedPoints
from .geometry import Ball, Hyperboloid
from .stepsize import ArmijoRule

DEFAULT_SLACK = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    violations: int
    worst_margin: float
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "params": self.params,
        }


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[CheckResult, ...]
    seed: int
    samples: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "samples": self.samples,
            "checks": [c.to_dict() for c in self.checks],
        }


def _inequality_checks(dim: int, samples: int, seed, slack: float) -> list[CheckResult]:
    man = Hyperboloid(dim)
    base = man.base_point()
    setup_rng = np.random.default_rng(np.random.SeedSequence([seed, dim]))
    anchors = [man.random_point(Ball(base, 1.0), setup_rng) for _ in range(3)]
    problem = MassProblem(WeightedPoints.equal_weights(anchors), 2.0, base)
    value, grad = problem.value, problem.gradient

    names = [
        f"squared_distance_descent_bound_H{dim}",
        f"cosh_distance_growth_bound_H{dim}",
        f"chord_gradient_step_bound_H{dim}",
    ]
    violations = [0, 0, 0]
    worst = [-math.inf, -math.inf, -math.inf]

    children = np.random.SeedSequence([seed, dim, 1]).spawn(samples)
    for child in children:
        rng = np.random.default_rng(child)
        x = man.random_point(Ball(base, 1.2), rng)
        z = man.random_point(Ball(base, 1.2), rng)
        if value(z) > value(x):
            x, z = z, x
        g = grad(x)
        gn = man.norm(x, g)
        if gn < 1e-12:
            continue  # vanishing gradient: the step direction is undefined
        # keep t |g| <= 1 so all three bounds apply
        t = rng.uniform(0.0, 1.0) / gn
        gamma_t = man.exp(x, g.scaled(-t))
        d_xz = man.dist(x, z)
        d_gz = man.dist(gamma_t, z)
        hb = tanh_ratio(d_xz)
        fx, fz = value(x), value(z)

        margin_a = d_gz**2 - (
            d_xz**2
            + (2.0 * math.sinh(t * gn) / (gn * hb)) * (t * gn * gn / 2.0 - hb * (fx - fz))
        )
        margin_b = math.cosh(d_gz) - math.cosh(d_xz) * (
            1.0 + 0.5 * t * gn * math.sinh(t * gn)
        )
        margin_c = d_gz**2 - (d_xz**2 + 1.5 * t * t * gn * gn / hb)

        for idx, margin in enumerate((margin_a, margin_b, margin_c)):
            worst[idx] = max(worst[idx], margin)
            if margin > slack:
                violations[idx] += 1

    params = {"dim": dim, "slack": slack, "anchors": len(anchors)}
    return [
        CheckResult(names[i], samples, violations[i], worst[i], params)
        for i in range(3)
    ]


def _sequence_growth_check(terms: int = 200) -> CheckResult:
    """Products of (1 + b_k) with summable b_k stay bounded and converge."""
    b = 0.5 ** np.arange(terms)
    a = np.cumprod(1.0 + b)
    bound = math.exp(math.fsum(b))  # a_k <= a_0 exp(sum b_k)
    bounded = bool(np.all(a <= bound * (1.0 + 1e-12)))
    tail = abs(a[-1] - a[-2]) / a[-1]
    convergent = tail <= 1e-12
    return CheckResult(
        name="ratio_sequence_boundedness",
        samples=terms,
        violations=0 if (bounded and convergent) else 1,
        worst_margin=tail,
        params={"growth": "b_k = 2^-k", "bound": bound},
    )


def _quasi_fejer_run_check(dim: int, seed, slack: float) -> CheckResult:
    man = Hyperboloid(dim)
    base = man.base_point()
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, 2]))
    anchors = [man.random_point(Ball(base, 1.0), rng) for _ in range(4)]
    problem = MassProblem(WeightedPoints.equal_weights(anchors), 2.0, base)
    x0 = man.random_point(Ball(base, 1.5), rng)
    trace = gradient_descent(
        problem.as_objective(), x0, ArmijoRule(beta=0.5), StopCriteria(grad_tol=1e-11)
    )
    margins = quasi_fejer_margins(trace, trace.final_point)
    return CheckResult(
        name=f"quasi_fejer_along_run_H{dim}",
        samples=trace.n_transitions,
        violations=int(np.sum(margins > slack)),
        worst_margin=float(np.max(margins, initial=-math.inf)),
        params={"dim": dim, "slack": slack, "status": trace.status.value},
    )


def run_inequality_suite(
    samples: int = 10_000,
    seed: int = 0,
    dims: tuple[int, ...] = (2, 5),
    slack: float = DEFAULT_SLACK,
) -> SuiteReport:
    """Run every verification check and collect a suite report."""
    checks: list[CheckResult] = []
    for dim in dims:
        checks.extend(_inequality_checks(dim, samples, seed, slack))
    checks.append(_sequence_growth_check())
    for dim in dims:
        checks.append(_quasi_fejer_run_check(dim, seed, slack))
    return SuiteReport(checks=tuple(checks), seed=seed, samples=samples)
