"""Geodesic gradient-descent drivers, traces, and convergence diagnostics.

The iteration is x_{k+1} = exp(x_k, -t_k grad f(x_k)) with the step picked
by a rule from :mod:`geodescent.stepsize`.  Every run records a full
:class:`IterateTrace`; diagnostics (rate fitting, quasi-Fejer checks)
operate on stored traces only, so they can be replayed offline.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .calculus import Objective
from .errors import (
    DomainExit,
    ExhaustedHalvings,
    InsufficientData,
    InvalidStart,
    InvariantViolation,
    LengthMismatch,
    ManifoldMismatch,
    SingularIterate,
    ZeroDistance,
)
from .geometry import Manifold, ManifoldPoint
from .stepsize import ConstantRule

# Relative growth treated as a genuine value increase under constant steps.
INCREASE_SLACK = 1e-12


class TraceStatus(str, enum.Enum):
    GRADIENT_TOL = "gradient_tol_reached"
    MAX_ITERS = "max_iters"
    NONDIFFERENTIABLE = "nondifferentiable_iterate"
    STEP_FAILURE = "step_failure"
    VALUE_INCREASE = "value_increase"
    POINT_TOL = "point_tol_reached"


@dataclass(frozen=True)
class StopCriteria:
    """Stopping thresholds; exact criticality is unreachable in floats."""

    grad_tol: float = 1e-10
    max_iters: int = 100_000
    point_tol: float | None = None

    def __post_init__(self):
        if self.grad_tol <= 0.0:
            raise InvariantViolation(f"grad_tol must be > 0, got {self.grad_tol}")
        if self.max_iters < 1:
            raise InvariantViolation(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class IterateTrace:
    """Complete record of one descent run.

    ``values`` and ``grad_norms`` align with ``points``; ``steps`` has one
    entry per transition.  ``grad_norms`` holds nan where the gradient was
    undefined (nondifferentiable terminal iterate).
    """

    manifold: Manifold
    points: tuple[ManifoldPoint, ...]
    values: np.ndarray
    grad_norms: np.ndarray
    steps: np.ndarray
    status: TraceStatus
    wall_time_s: float
    rule_info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_transitions(self) -> int:
        return len(self.steps)

    @property
    def final_point(self) -> ManifoldPoint:
        return self.points[-1]

    @property
    def final_value(self) -> float:
        return float(self.values[-1])

    @property
    def final_grad_norm(self) -> float:
        return float(self.grad_norms[-1])

    def decrease_margins(self, beta: float) -> np.ndarray:
        """f(x_{k+1}) - f(x_k) + beta t_k |g_k|^2 per transition (<= 0 is good)."""
        if self.n_transitions == 0:
            return np.zeros(0)
        f = self.values
        g = self.grad_norms[:-1]
        return f[1:] - f[:-1] + beta * self.steps * g * g

    def step_energy(self) -> float:
        """Sum of t_k |grad f(x_k)|^2 over all transitions."""
        g = self.grad_norms[: self.n_transitions]
        return float(np.sum(self.steps * g * g))

    def dist_to_final(self) -> np.ndarray:
        ref = self.final_point
        return np.array([self.manifold.dist(p, ref) for p in self.points])


def _run(obj: Objective, x0: ManifoldPoint, rule, stop: StopCriteria) -> IterateTrace:
    man = obj.manifold
    start = time.perf_counter()
    fx = obj.value(x0)
    if not math.isfinite(fx):
        raise InvalidStart("initial point is outside the domain of the objective")

    points = [x0]
    values = [fx]
    grad_norms: list[float] = []
    steps: list[float] = []
    status = None
    pending: TraceStatus | None = None
    detect_increase = not rule.certifies_decrease
    x = x0

    while True:
        try:
            g = obj.gradient(x)
        except SingularIterate:
            grad_norms.append(math.nan)
            status = TraceStatus.NONDIFFERENTIABLE
            break
        gn = man.norm(x, g)
        grad_norms.append(gn)
        if gn <= stop.grad_tol:
            status = TraceStatus.GRADIENT_TOL
            break
        if pending is not None:
            status = pending
            break
        if len(steps) >= stop.max_iters:
            status = TraceStatus.MAX_ITERS
            break
        try:
            t, x_next, f_next = rule.select(obj, x, g, fx)
        except (ExhaustedHalvings, DomainExit):
            status = TraceStatus.STEP_FAILURE
            break
        steps.append(t)
        points.append(x_next)
        values.append(f_next)
        if detect_increase and f_next > fx + INCREASE_SLACK * (1.0 + abs(fx)):
            pending = TraceStatus.VALUE_INCREASE
        elif stop.point_tol is not None and man.dist(x, x_next) <= stop.point_tol:
            pending = TraceStatus.POINT_TOL
        x, fx = x_next, f_next

    return IterateTrace(
        manifold=man,
        points=tuple(points),
        values=np.array(values),
        grad_norms=np.array(grad_norms),
        steps=np.array(steps),
        status=status,
        wall_time_s=time.perf_counter() - start,
        rule_info=dict(rule.info()),
    )


def gradient_descent(
    obj: Objective,
    x0: ManifoldPoint,
    rule,
    stop: StopCriteria | None = None,
) -> IterateTrace:
    """Run geodesic descent from ``x0`` under the given step rule.

    Terminates on the gradient tolerance, the iteration cap, an optional
    point-movement tolerance, a nondifferentiable iterate, or step failure;
    the reason is recorded in the trace status.  Rules that do not certify
    decrease additionally stop with VALUE_INCREASE as soon as the cost
    grows (the trailing grown iterate is kept as evidence).
    """
    return _run(obj, x0, rule, stop or StopCriteria())


def constant_step_descent(
    obj: Objective,
    x0: ManifoldPoint,
    t0: float,
    stop: StopCriteria | None = None,
) -> IterateTrace:
    """Descent with the fixed step ``t0`` (monotone only if t0 is small enough)."""
    return _run(obj, x0, ConstantRule(t0), stop or StopCriteria())


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit d(x_k, x*) ~ mu * rho^k over a trailing window."""

    mu: float
    rho: float
    r_squared: float
    window: tuple[int, int]

    def indicates_linear(self, r2_min: float = 0.995) -> bool:
        """Whether the fit supports a linear (geometric) convergence claim."""
        return self.rho < 1.0 and self.r_squared >= r2_min

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "rho": self.rho,
            "r_squared": self.r_squared,
            "window": list(self.window),
        }


def estimate_linear_rate(
    trace: IterateTrace,
    x_star: ManifoldPoint | None = None,
    tail_fraction: float = 0.5,
) -> RateFit:
    """Fit log d(x_k, x*) against k over the trailing window of a run.

    ``x_star`` defaults to the final iterate, which is then excluded from
    the fit along with any iterate within 100 ulps of ``x_star`` (their
    logs are numerical noise).  At least 5 usable iterates are required.
    """
    if trace.n_transitions < 8:
        raise InsufficientData(
            f"rate fitting needs >= 8 transitions, trace has {trace.n_transitions}"
        )
    man = trace.manifold
    if x_star is None:
        x_star = trace.final_point
    elif x_star.manifold != man:
        raise ManifoldMismatch("x_star lives on a different manifold")

    dists = np.array([man.dist(p, x_star) for p in trace.points[:-1]])
    floor = 100.0 * np.finfo(float).eps
    usable = np.nonzero(dists > floor)[0]
    if usable.size < 5:
        raise ZeroDistance("iterates are numerically at x_star; nothing to fit")
    start = usable[int((1.0 - tail_fraction) * usable.size)]
    ks = usable[usable >= start]
    if ks.size < 5:
        ks = usable[-5:]
    logs = np.log(dists[ks])
    slope, intercept = np.polyfit(ks, logs, 1)
    fitted = slope * ks + intercept
    ss_res = float(np.sum((logs - fitted) ** 2))
    ss_tot = float(np.sum((logs - np.mean(logs)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(
        mu=float(np.exp(intercept)),
        rho=float(np.exp(slope)),
        r_squared=r2,
        window=(int(ks[0]), int(ks[-1])),
    )


def quasi_fejer_margins(
    trace: IterateTrace,
    z: ManifoldPoint,
    eps: np.ndarray | None = None,
    cap_R: float | None = None,
) -> np.ndarray:
    """Per-transition margins d^2(x_{k+1}, z) - d^2(x_k, z) - eps_k.

    The default perturbation is eps_k = 2 R t_k |grad f(x_k)|^2 with R the
    largest step cap consistent with the trace.
    """
    if z.manifold != trace.manifold:
        raise ManifoldMismatch("reference point lives on a different manifold")
    n = trace.n_transitions
    if eps is None:
        if cap_R is None:
            cap_R = max(1.0, float(np.max(trace.steps, initial=0.0)))
        g = trace.grad_norms[:n]
        eps = 2.0 * cap_R * trace.steps * g * g
    else:
        eps = np.asarray(eps, dtype=float)
        if eps.shape != (n,):
            raise LengthMismatch(f"eps must have length {n}, got {eps.shape}")
    d2 = np.array([trace.manifold.dist(p, z) ** 2 for p in trace.points])
    return d2[1:] - d2[:-1] - eps


def quasi_fejer_check(
    trace: IterateTrace,
    z: ManifoldPoint,
    eps: np.ndarray | None = None,
    cap_R: float | None = None,
    slack: float = 1e-9,
) -> bool:
    """True iff every transition satisfies the quasi-Fejer inequality."""
    if trace.n_transitions == 0:
        return True
    return bool(np.all(quasi_fejer_margins(trace, z, eps, cap_R) <= slack))
