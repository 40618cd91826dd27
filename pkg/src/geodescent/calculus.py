"""Objective functions and numerical probes.

An :class:`Objective` bundles a scalar cost, its Riemannian gradient, and a
domain indicator over one manifold.  The probes in this module check
properties (gradient consistency, geodesic convexity, sharp minima)
empirically by seeded sampling; every probe derives one child seed per
sample so results do not depend on evaluation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainExit,
    NegativeArgument,
    NegativeGap,
    RegionTooLarge,
)
from .geometry import Ball, Manifold, ManifoldPoint, TangentVec

# Near-optimal central difference steps for double precision.
DEFAULT_H1 = 1e-5
DEFAULT_H2 = 1e-4

# Interior chord parameters used by the convexity probes (midpoint included).
CHORD_TS = np.linspace(0.0, 1.0, 19)[1:-1]


class Location(str, enum.Enum):
    """Where a point sits relative to an objective's domain."""

    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _all_inside(x: ManifoldPoint) -> Location:
    return Location.INSIDE


@dataclass(frozen=True)
class Objective:
    """A proper extended-real-valued cost with gradient and domain indicator.

    ``value`` must return ``+inf`` exactly on points reported OUTSIDE;
    ``gradient`` may raise where the cost is not differentiable.
    ``lower_bound`` records a known finite lower bound of the cost when one
    is available (diagnostics only).
    """

    manifold: Manifold
    value: Callable[[ManifoldPoint], float]
    gradient: Callable[[ManifoldPoint], TangentVec]
    domain: Callable[[ManifoldPoint], Location] = _all_inside
    lower_bound: float = -math.inf


def tanh_ratio(t: float) -> float:
    """The decreasing function tanh(t)/t, extended continuously by 1 at 0.

    For t < 1e-5 the two-term series 1 - t^2/3 is used; its error there is
    below 1e-20, avoiding the 0/0 evaluation.
    """
    if t < 0:
        raise NegativeArgument(f"tanh_ratio needs t >= 0, got {t}")
    if t < 1e-5:
        return 1.0 - t * t / 3.0
    return math.tanh(t) / t


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of a sampling probe: counts, worst margin, and a witness."""

    name: str
    samples: int
    violations: int
    worst_margin: float
    witness: dict | None = None
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
            "witness": self.witness,
            "params": self.params,
        }


def finite_diff_gradient_check(
    obj: Objective, x: ManifoldPoint, h: float = DEFAULT_H1
) -> float:
    """Worst relative error between the gradient and central differences.

    Compares <grad f(x), b> against [f(exp(x, h b)) - f(exp(x, -h b))] / 2h
    over an orthonormal tangent basis; errors are scaled by 1 + |analytic|.
    Raises DomainExit if a perturbed point leaves the domain.
    """
    man = obj.manifold
    grad = obj.gradient(x)
    worst = 0.0
    for direction in man.tangent_basis(x):
        analytic = man.inner(x, grad, direction)
        f_plus = obj.value(man.exp(x, direction.scaled(h)))
        f_minus = obj.value(man.exp(x, direction.scaled(-h)))
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise DomainExit("finite-difference stencil left the domain")
        numeric = (f_plus - f_minus) / (2.0 * h)
        worst = max(worst, abs(analytic - numeric) / (1.0 + abs(analytic)))
    return worst


def second_directional_derivative(
    obj: Objective, x: ManifoldPoint, direction: TangentVec, h: float = DEFAULT_H2
) -> float:
    """Central second difference of f along the geodesic through x."""
    man = obj.manifold
    f0 = obj.value(x)
    f_plus = obj.value(man.exp(x, direction.scaled(h)))
    f_minus = obj.value(man.exp(x, direction.scaled(-h)))
    if not (math.isfinite(f0) and math.isfinite(f_plus) and math.isfinite(f_minus)):
        raise DomainExit("second-difference stencil left the domain")
    return (f_plus - 2.0 * f0 + f_minus) / (h * h)


def _chord_probe(
    name: str,
    obj: Objective,
    region: Ball,
    samples: int,
    seed,
    bound_fn,
    slack: float,
) -> ProbeReport:
    man = obj.manifold
    if region.radius >= man.convexity_radius(region.center):
        raise RegionTooLarge(
            f"region radius {region.radius} >= convexity radius "
            f"{man.convexity_radius(region.center)}"
        )
    children = np.random.SeedSequence(seed).spawn(samples)
    violations = 0
    worst = -math.inf
    witness = None
    for child in children:
        rng = np.random.default_rng(child)
        a = man.random_point(region, rng)
        b = man.random_point(region, rng)
        fa, fb = obj.value(a), obj.value(b)
        step = man.log(a, b)
        chord_bad = False
        for t in CHORD_TS:
            lhs = obj.value(man.exp(a, step.scaled(t)))
            rhs = bound_fn(fa, fb, t)
            margin = lhs - rhs
            if not math.isfinite(margin):
                margin = math.inf
            if margin > worst:
                worst = margin
                if margin > slack:
                    witness = {
                        "a": a.coords.tolist(),
                        "b": b.coords.tolist(),
                        "t": float(t),
                        "lhs": lhs,
                        "rhs": rhs,
                    }
            if margin > slack:
                chord_bad = True
        if chord_bad:
            violations += 1
    return ProbeReport(
        name=name,
        samples=samples,
        violations=violations,
        worst_margin=worst,
        witness=witness if violations > 0 else None,
        params={"radius": region.radius, "slack": slack},
    )


def convexity_probe(
    obj: Objective, region: Ball, samples: int = 200, seed=0, slack: float = 1e-9
) -> ProbeReport:
    """Sample geodesic chords and test f(gamma(t)) <= (1-t) f(a) + t f(b)."""
    return _chord_probe(
        "convexity",
        obj,
        region,
        samples,
        seed,
        lambda fa, fb, t: (1.0 - t) * fa + t * fb,
        slack,
    )


def quasi_convexity_probe(
    obj: Objective, region: Ball, samples: int = 200, seed=0, slack: float = 1e-9
) -> ProbeReport:
    """Sample geodesic chords and test f(gamma(t)) <= max(f(a), f(b))."""
    return _chord_probe(
        "quasi_convexity",
        obj,
        region,
        samples,
        seed,
        lambda fa, fb, t: max(fa, fb),
        slack,
    )


def estimate_sharpness(
    obj: Objective,
    xbar: ManifoldPoint,
    order: float,
    radius: float,
    samples: int = 200,
    seed=0,
) -> float:
    """Empirical sharp-minimum modulus of the given order at ``xbar``.

    Returns the infimum over sampled points of (f(x) - f(xbar)) / d(x, xbar)^q,
    treating the minimizing set as the single point ``xbar`` (valid when the
    minimizer in the ball is unique).  A positive result certifies sharpness
    on the sample; NegativeGap means ``xbar`` is not a local minimizer.
    """
    man = obj.manifold
    f_bar = obj.value(xbar)
    region = Ball(xbar, radius)
    children = np.random.SeedSequence(seed).spawn(samples)
    alpha = math.inf
    for child in children:
        x = man.random_point(region, np.random.default_rng(child))
        d = man.dist(xbar, x)
        if d < 1e-12:
            continue
        gap = obj.value(x) - f_bar
        if gap < -1e-12:
            raise NegativeGap(
                f"f drops {gap:.3e} below f(xbar); not a local minimizer"
            )
        alpha = min(alpha, max(gap, 0.0) / d**order)
    return alpha


def estimate_gradient_lipschitz(
    obj: Objective, region: Ball, samples: int = 200, seed=0
) -> float:
    """Largest sampled transport difference |grad f(a) - P grad f(b)| / d(a, b)."""
    man = obj.manifold
    children = np.random.SeedSequence(seed).spawn(samples)
    worst = 0.0
    for child in children:
        rng = np.random.default_rng(child)
        a = man.random_point(region, rng)
        b = man.random_point(region, rng)
        d = man.dist(a, b)
        if d < 1e-10:
            continue
        ga = obj.gradient(a)
        gb_at_a = man.transport(b, a, obj.gradient(b))
        diff = ga.plus(gb_at_a.scaled(-1.0))
        worst = max(worst, man.norm(a, diff) / d)
    return worst
