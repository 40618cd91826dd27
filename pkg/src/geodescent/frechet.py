"""Weighted L^p centers of mass on manifolds.

The cost is f_p(x) = (1/p) sum_i w_i d(x, y_i)^p restricted to an open
ball U(o, rho) around an anchor point; its gradient is
-sum_i w_i d(x, y_i)^{p-2} log_x(y_i) over the indices with y_i != x.
Data terms are accumulated with exact (error-free) summation so values and
gradients are bitwise independent of the data ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .calculus import Location, Objective, second_directional_derivative
from .descent import (
    IterateTrace,
    StopCriteria,
    TraceStatus,
    estimate_linear_rate,
    gradient_descent,
)
from .errors import (
    DomainExit,
    InsufficientData,
    InvariantViolation,
    ManifoldMismatch,
    OutsideDomain,
    SingularIterate,
    StepFailure,
    ValidationFailure,
    ZeroDistance,
)
from .geometry import Ball, CurvatureBounds, Manifold, ManifoldPoint, TangentVec
from .stepsize import ArmijoRule, ConstantRule

# Iterates closer than this to a data point are nonsmooth collisions for p < 2.
SINGULAR_TOL = 1e-9

# Width of the reported boundary band of the open domain ball.
BOUNDARY_BAND = 1e-9


def _fsum_rows(rows: np.ndarray) -> np.ndarray:
    """Column-wise error-free summation; exact up to final rounding."""
    return np.array([math.fsum(col) for col in rows.T])


@dataclass(frozen=True)
class WeightedPoints:
    """Data points y_i with weights w_i in (0, 1) summing to one."""

    points: tuple[ManifoldPoint, ...]
    weights: np.ndarray

    def __post_init__(self):
        points = tuple(self.points)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        if len(points) < 2:
            raise InvariantViolation("a data set needs at least 2 points")
        if weights.shape != (len(points),):
            raise InvariantViolation(
                f"{len(points)} points but {weights.size} weights"
            )
        man = points[0].manifold
        for i, p in enumerate(points):
            if p.manifold != man:
                raise ManifoldMismatch(f"data point {i} lives on a different manifold")
        if np.any(weights <= 0.0) or np.any(weights >= 1.0):
            raise InvariantViolation("weights must lie strictly inside (0, 1)")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise InvariantViolation(
                f"weights must sum to 1 within 1e-12, got {math.fsum(weights)!r}"
            )
        weights.setflags(write=False)

    @classmethod
    def equal_weights(cls, points) -> "WeightedPoints":
        points = tuple(points)
        n = len(points)
        return cls(points, np.full(n, 1.0 / n))

    @property
    def manifold(self) -> Manifold:
        return self.points[0].manifold

    def __len__(self) -> int:
        return len(self.points)

    def permuted(self, order) -> "WeightedPoints":
        order = list(order)
        return WeightedPoints(
            tuple(self.points[i] for i in order), self.weights[order]
        )


@dataclass(frozen=True)
class MassProblem:
    """Center-of-mass instance: data, exponent p, and the domain ball U(o, radius)."""

    data: WeightedPoints
    p: float
    anchor: ManifoldPoint
    radius: float = math.inf

    def __post_init__(self):
        if self.p < 1.0:
            raise InvariantViolation(f"exponent p must be >= 1, got {self.p}")
        if self.radius <= 0.0:
            raise InvariantViolation(f"radius must be > 0, got {self.radius}")
        if self.anchor.manifold != self.data.manifold:
            raise ManifoldMismatch("anchor lives on a different manifold")

    @property
    def manifold(self) -> Manifold:
        return self.data.manifold

    def domain(self, x: ManifoldPoint) -> Location:
        if not math.isfinite(self.radius):
            return Location.INSIDE
        d = self.manifold.dist(self.anchor, x)
        if d >= self.radius:
            return Location.OUTSIDE
        if d >= self.radius - BOUNDARY_BAND:
            return Location.BOUNDARY
        return Location.INSIDE

    def value(self, x: ManifoldPoint) -> float:
        """f_p(x), or +inf outside the open domain ball."""
        man = self.manifold
        if math.isfinite(self.radius) and man.dist(self.anchor, x) >= self.radius:
            return math.inf
        terms = [
            (w / self.p) * man.dist(x, y) ** self.p
            for y, w in zip(self.data.points, self.data.weights)
        ]
        return math.fsum(terms)

    def gradient(self, x: ManifoldPoint) -> TangentVec:
        """Riemannian gradient of f_p; raises SingularIterate on p < 2 collisions."""
        man = self.manifold
        if math.isfinite(self.radius) and man.dist(self.anchor, x) >= self.radius:
            raise OutsideDomain("gradient requested outside the domain ball")
        rows = []
        for i, (y, w) in enumerate(zip(self.data.points, self.data.weights)):
            d = man.dist(x, y)
            if d == 0.0:
                if self.p == 1.0:
                    raise SingularIterate(
                        f"iterate coincides with data point {i} (p = 1)"
                    )
                # p > 1: the term vanishes; skip it.
                continue
            if self.p < 2.0 and d <= SINGULAR_TOL:
                raise SingularIterate(
                    f"iterate within {SINGULAR_TOL} of data point {i} (p = {self.p})"
                )
            rows.append(w * d ** (self.p - 2.0) * man.log(x, y).coords)
        if not rows:
            return man.zero_tangent(x)
        summed = _fsum_rows(np.array(rows))
        return man.project_tangent(x, -summed)

    def as_objective(self) -> Objective:
        return Objective(
            manifold=self.manifold,
            value=self.value,
            gradient=self.gradient,
            domain=self.domain,
            lower_bound=0.0,
        )

    def data_values(self) -> np.ndarray:
        """f_p evaluated at each data point."""
        return np.array([self.value(y) for y in self.data.points])


def admissible_radius_bound(
    p: float,
    radius: float,
    region_bounds: CurvatureBounds,
    injectivity_radius: float,
) -> float:
    """Largest admissible domain radius for the given exponent and region.

    Returns (1/2) min(r_inj, pi / (2 sqrt(Dmax))) for p in [1, 2) and
    (1/2) min(r_inj, pi / sqrt(Dmax)) for p >= 2, where Dmax is the upper
    curvature bound; nonpositive Dmax makes the trigonometric cap infinite.
    """
    if p < 1.0:
        raise InvariantViolation(f"exponent p must be >= 1, got {p}")
    if radius <= 0.0:
        raise InvariantViolation(f"radius must be > 0, got {radius}")
    upper = region_bounds.kappa_hi
    if upper <= 0.0:
        trig_cap = math.inf
    else:
        trig_cap = math.pi / math.sqrt(upper)
        if p < 2.0:
            trig_cap /= 2.0
    return 0.5 * min(injectivity_radius, trig_cap)


def distance_second_derivative_bound(curvature: float, length: float) -> float:
    """Comparison coefficient for the radial second derivative of distance.

    Evaluates cot-type bounds: sqrt(k)^-1 cot(sqrt(k) l) for positive
    curvature (valid for l < pi / sqrt(k)), 1/l in the flat case, and
    sqrt(|k|)^-1 coth(sqrt(|k|) l) for negative curvature.
    """
    from .errors import RangeViolation

    if length <= 0.0:
        raise RangeViolation(f"length must be > 0, got {length}")
    if curvature > 0.0:
        root = math.sqrt(curvature)
        if length >= math.pi / root:
            raise RangeViolation(
                f"length {length} >= pi/sqrt(curvature) = {math.pi / root}"
            )
        return math.cos(root * length) / (root * math.sin(root * length))
    if curvature == 0.0:
        return 1.0 / length
    root = math.sqrt(-curvature)
    return math.cosh(root * length) / (root * math.sinh(root * length))


def is_collinear(data: WeightedPoints, tol: float = 1e-8) -> bool:
    """Whether all points lie on the geodesic segment through the farthest pair."""
    man = data.manifold
    pts = data.points
    n = len(pts)
    if n == 2:
        return True
    best = (0, 1, man.dist(pts[0], pts[1]))
    for i in range(n):
        for j in range(i + 1, n):
            d = man.dist(pts[i], pts[j])
            if d > best[2]:
                best = (i, j, d)
    i, j, span = best
    if span < 1e-15:
        return all(man.dist(pts[i], q) <= tol for q in pts)
    a = pts[i]
    direction = man.log(a, pts[j])
    worst = 0.0
    for k, y in enumerate(pts):
        if k in (i, j):
            continue
        res = scipy.optimize.minimize_scalar(
            lambda t: man.dist(man.exp(a, direction.scaled(t)), y),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-12},
        )
        worst = max(worst, float(res.fun))
        if worst > tol:
            return False
    return worst <= tol


@dataclass(frozen=True)
class ConditionCheck:
    """A single admissibility condition with its outcome."""

    name: str
    passed: bool | None  # None = not applicable / pending post-hoc evaluation
    required: bool
    post_hoc: bool
    detail: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "required": self.required,
            "post_hoc": self.post_hoc,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    """Per-condition admissibility report for a center-of-mass instance."""

    conditions: list[ConditionCheck] = field(default_factory=list)
    suggested_radius_max: float = math.nan

    def add(self, name, passed, required=False, post_hoc=False, detail=""):
        self.conditions.append(ConditionCheck(name, passed, required, post_hoc, detail))

    def get(self, name: str) -> ConditionCheck:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def update(self, name: str, passed: bool, detail: str):
        c = self.get(name)
        self.conditions[self.conditions.index(c)] = ConditionCheck(
            c.name, passed, c.required, c.post_hoc, detail
        )

    @property
    def hard_pass(self) -> bool:
        return all(c.passed is not False for c in self.conditions if c.required)

    def failures(self) -> list[str]:
        return [c.name for c in self.conditions if c.required and c.passed is False]

    def to_dict(self) -> dict:
        return {
            "hard_pass": self.hard_pass,
            "suggested_radius_max": self.suggested_radius_max,
            "conditions": [c.to_dict() for c in self.conditions],
        }


def validate_configuration(
    problem: MassProblem, x0: ManifoldPoint | None = None
) -> ValidationReport:
    """Check the admissibility conditions of a center-of-mass instance.

    Hard conditions: the domain-radius bound together with data containment,
    and (for p = 1) non-collinearity plus a strictly better initial value
    than every data point.  The global-minimum condition depends on the
    unknown optimum, so it is recorded as pending and re-evaluated against
    the computed center after a solve.
    """
    man = problem.manifold
    report = ValidationReport()
    bounds = man.curvature_bounds()
    r_inj = man.injectivity_radius()
    probe_radius = problem.radius if math.isfinite(problem.radius) else 1.0
    cap = admissible_radius_bound(problem.p, probe_radius, bounds, r_inj)
    report.suggested_radius_max = cap

    dists = np.array([man.dist(problem.anchor, y) for y in problem.data.points])
    if math.isfinite(problem.radius):
        ok = problem.radius <= cap and bool(np.all(dists < problem.radius))
        detail = (
            f"radius {problem.radius:.6g} vs bound {cap:.6g}; "
            f"max anchor distance {dists.max():.6g}"
        )
    else:
        hadamard = bounds.kappa_hi <= 0.0 and math.isinf(r_inj)
        ok = hadamard
        detail = (
            "infinite radius admissible (Hadamard backend)"
            if hadamard
            else "infinite radius requires a Hadamard backend"
        )
    report.add("radius_bound", ok, required=True, detail=detail)

    if problem.p == 1.0:
        collinear = is_collinear(problem.data)
        report.add(
            "non_collinear",
            not collinear,
            required=True,
            detail="data lies on a single geodesic" if collinear else "data spans",
        )

    if problem.p < 2.0 and x0 is not None:
        data_min = float(np.min(problem.data_values()))
        f0 = problem.value(x0)
        ok = f0 < data_min
        report.add(
            "initial_value_strict",
            ok,
            required=(problem.p == 1.0),
            detail=f"f(x0) = {f0:.6g} vs min over data {data_min:.6g}",
        )

    inner_third = bool(np.all(dists < problem.radius / 3.0))
    report.add(
        "data_in_inner_third",
        inner_third,
        detail="constant-step containment condition (informational)",
    )

    report.add(
        "global_min_below_data",
        None,
        post_hoc=True,
        detail="pending: requires the computed center",
    )
    return report


def estimate_hessian_bound(
    problem: MassProblem,
    x0: ManifoldPoint,
    samples: int = 256,
    directions: int = 8,
    seed=0,
) -> float:
    """Estimated supremum of the cost Hessian on the initial sub-level set.

    Rejection-samples points z with f(z) <= f(x0) in the domain ball and
    takes the worst second directional difference over random unit
    directions, inflated by a 1.1 safety factor.  For p = 2 on Hadamard
    backends a closed-form comparison bound is also computed and the
    smaller of the two values is returned.  This is an estimate, not a
    certificate.
    """
    man = problem.manifold
    obj = problem.as_objective()
    f0 = problem.value(x0)
    if not math.isfinite(f0):
        raise OutsideDomain("x0 is outside the domain ball")

    # Every sub-level point satisfies d(z, y_i) <= (p f0 / w_i)^(1/p).
    reach = float(
        np.min(
            [
                man.dist(problem.anchor, y) + (problem.p * f0 / w) ** (1.0 / problem.p)
                for y, w in zip(problem.data.points, problem.data.weights)
            ]
        )
    )
    h = 1e-4
    sample_radius = min(
        problem.radius - 10.0 * h if math.isfinite(problem.radius) else math.inf,
        max(reach, 1e-6),
    )
    region = Ball(problem.anchor, sample_radius)

    guard = 10.0 * h if problem.p < 2.0 else 0.0

    def probe(z: ManifoldPoint, rng) -> float:
        worst = 0.0
        for _ in range(directions):
            v = man.random_tangent(z, 1.0, rng)
            n = man.norm(z, v)
            if n == 0.0:
                continue
            try:
                d2 = second_directional_derivative(obj, z, v.scaled(1.0 / n), h)
            except DomainExit:
                continue  # stencil straddles the domain wall; skip direction
            worst = max(worst, d2)
        return worst

    root = np.random.SeedSequence(seed)
    sampled_max = probe(x0, np.random.default_rng(root.spawn(1)[0]))
    accepted = 0
    skipped = 0
    attempts = 0
    max_attempts = 50 * samples
    children = iter(root.spawn(max_attempts + 1))
    while accepted < samples and attempts < max_attempts:
        attempts += 1
        rng = np.random.default_rng(next(children))
        z = man.random_point(region, rng)
        if problem.value(z) > f0:
            continue
        if guard > 0.0 and min(man.dist(z, y) for y in problem.data.points) <= guard:
            skipped += 1
            continue
        sampled_max = max(sampled_max, probe(z, rng))
        accepted += 1

    estimate = 1.1 * sampled_max

    bounds = man.curvature_bounds()
    hadamard = bounds.kappa_hi <= 0.0 and math.isinf(man.injectivity_radius())
    if problem.p == 2.0 and hadamard:
        w_min = float(np.min(problem.data.weights))
        d_max = math.sqrt(2.0 * f0 / w_min)
        s = math.sqrt(-bounds.kappa_lo)
        if s == 0.0 or d_max == 0.0:
            closed = 1.0
        else:
            closed = s * d_max / math.tanh(s * d_max)
        return min(estimate, closed)
    return estimate


@dataclass(frozen=True)
class CenterResult:
    """Computed center with its trace and certificates."""

    center: ManifoldPoint
    trace: IterateTrace
    certificates: dict

    @property
    def converged(self) -> bool:
        return self.trace.status in (TraceStatus.GRADIENT_TOL, TraceStatus.POINT_TOL)


def center_of_mass(
    problem: MassProblem,
    x0: ManifoldPoint | None = None,
    rule=None,
    stop: StopCriteria | None = None,
) -> CenterResult:
    """Solve a validated center-of-mass instance by geodesic descent.

    Raises ValidationFailure when a hard admissibility condition fails,
    SingularIterate when the run dies on a nonsmooth collision (p < 2),
    and StepFailure when no admissible step exists; both carry the partial
    trace.  The pending global-minimum condition is re-evaluated at the
    computed center and stored in the returned validation report.
    """
    if x0 is None:
        x0 = problem.anchor
    report = validate_configuration(problem, x0)
    if not report.hard_pass:
        raise ValidationFailure(
            f"configuration failed hard conditions: {report.failures()}", report
        )
    rule = rule if rule is not None else ArmijoRule(beta=0.5)
    trace = gradient_descent(problem.as_objective(), x0, rule, stop)
    if trace.status == TraceStatus.NONDIFFERENTIABLE:
        raise SingularIterate(
            "descent hit a nonsmooth collision with a data point", trace
        )
    if trace.status == TraceStatus.STEP_FAILURE:
        raise StepFailure("no admissible step size at an iterate", trace)

    center = trace.final_point
    data_min = float(np.min(problem.data_values()))
    center_value = problem.value(center)
    report.update(
        "global_min_below_data",
        center_value < data_min,
        f"f(center) = {center_value:.6g} vs min over data {data_min:.6g}",
    )

    rate_fit = None
    if trace.n_transitions >= 8:
        try:
            rate_fit = estimate_linear_rate(trace)
        except (InsufficientData, ZeroDistance):
            rate_fit = None

    certificates = {
        "grad_norm_final": trace.final_grad_norm,
        "rate_fit": rate_fit,
        "validation": report,
    }
    return CenterResult(center=center, trace=trace, certificates=certificates)


def auto_constant_rule(
    problem: MassProblem, x0: ManifoldPoint, seed=0, samples: int = 256
) -> ConstantRule:
    """Constant rule with t0 = 1 / (estimated Hessian bound) at x0."""
    lam = estimate_hessian_bound(problem, x0, samples=samples, seed=seed)
    return ConstantRule(1.0 / lam)
