"""Step-size policies for geodesic gradient descent.

A rule's ``select`` returns the chosen step together with the trial point
and value so the driver never re-evaluates the objective.  The Armijo rule
returns the largest power 2^-i (i = 0, 1, ...) passing the sufficient
decrease test, so its steps always lie in (0, 1]; the ``cap_R`` bound is
only relevant for externally supplied rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .calculus import Objective
from .errors import (
    DomainExit,
    ExhaustedHalvings,
    InvariantViolation,
    StepFailure,
    ZeroGradient,
)
from .geometry import ManifoldPoint, TangentVec

# Absolute slack applied by the standalone sufficient-decrease predicate.
DECREASE_SLACK = 1e-12

# 2^-60 ~ 8.7e-19: below any representable progress in double precision.
DEFAULT_MAX_HALVINGS = 60

_EPS = 2.220446049250313e-16


def _noise_slack(fx: float, f_trial: float) -> float:
    """Rounding-scale tolerance for in-search acceptance decisions.

    The backtracking loop must not use the much looser DECREASE_SLACK: once
    beta t |g|^2 drops below an absolute slack, expansive trial steps get
    accepted spuriously and the iteration cycles at a gradient-norm floor
    instead of converging.  A few ulps of the cost absorb evaluation noise
    without admitting such steps.
    """
    return 4.0 * _EPS * max(1.0, abs(fx), abs(f_trial))


def sufficient_decrease_check(
    obj: Objective,
    x: ManifoldPoint,
    g: TangentVec,
    t: float,
    beta: float,
) -> bool:
    """True iff f(exp(x, -t g)) <= f(x) - beta t |g|^2 (with 1e-12 slack)."""
    gnorm2 = obj.manifold.inner(x, g, g)
    if gnorm2 == 0.0:
        raise ZeroGradient("sufficient decrease is undefined for a zero gradient")
    trial = obj.manifold.exp(x, g.scaled(-t))
    return obj.value(trial) <= obj.value(x) - beta * t * gnorm2 + DECREASE_SLACK


def _armijo(
    obj: Objective,
    x: ManifoldPoint,
    g: TangentVec,
    fx: float,
    beta: float,
    max_halvings: int,
) -> tuple[float, ManifoldPoint, float]:
    gnorm2 = obj.manifold.inner(x, g, g)
    if gnorm2 == 0.0:
        raise ZeroGradient("Armijo search is undefined for a zero gradient")
    any_finite = False
    for i in range(max_halvings + 1):
        t = 2.0**-i
        trial = obj.manifold.exp(x, g.scaled(-t))
        f_trial = obj.value(trial)
        if math.isfinite(f_trial):
            any_finite = True
            if f_trial <= fx - beta * t * gnorm2 + _noise_slack(fx, f_trial):
                return t, trial, f_trial
    if not any_finite:
        raise DomainExit("every Armijo trial point left the domain")
    raise ExhaustedHalvings(
        f"no sufficient decrease within {max_halvings} halvings (t >= 2^-{max_halvings})"
    )


def armijo_step(
    obj: Objective,
    x: ManifoldPoint,
    g: TangentVec,
    beta: float,
    max_halvings: int = DEFAULT_MAX_HALVINGS,
) -> float:
    """Largest step 2^-i satisfying the sufficient decrease condition."""
    t, _, _ = _armijo(obj, x, g, obj.value(x), beta, max_halvings)
    return t


def armijo_step_floor(beta: float, lipschitz: float) -> float:
    """Theoretical lower bound (1 - beta) / (2 L) on accepted Armijo steps.

    Diagnostic value for runs whose gradient field is L-Lipschitz near the
    limit; the iteration itself never uses it.
    """
    if not 0.0 < beta < 1.0:
        raise InvariantViolation(f"beta must be in (0, 1), got {beta}")
    if lipschitz <= 0.0:
        raise InvariantViolation(f"Lipschitz constant must be > 0, got {lipschitz}")
    return (1.0 - beta) / (2.0 * lipschitz)


@dataclass(frozen=True)
class ArmijoRule:
    """Backtracking halving rule; every accepted step certifies decrease."""

    beta: float = 0.5
    cap_R: float = 1.0
    max_halvings: int = DEFAULT_MAX_HALVINGS
    certifies_decrease = True
    name = "armijo"

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise InvariantViolation(f"beta must be in (0, 1), got {self.beta}")
        if self.cap_R < 1.0:
            raise InvariantViolation(f"cap_R must be >= 1, got {self.cap_R}")

    def select(self, obj, x, g, fx):
        return _armijo(obj, x, g, fx, self.beta, self.max_halvings)

    def info(self) -> dict:
        return {"rule": self.name, "beta": self.beta, "max_halvings": self.max_halvings}


@dataclass(frozen=True)
class ConstantRule:
    """Fixed step size; no decrease condition is enforced while iterating."""

    t0: float
    certifies_decrease = False
    name = "constant"

    def __post_init__(self):
        if self.t0 <= 0.0:
            raise InvariantViolation(f"t0 must be > 0, got {self.t0}")

    def select(self, obj, x, g, fx):
        trial = obj.manifold.exp(x, g.scaled(-self.t0))
        return self.t0, trial, obj.value(trial)

    def info(self) -> dict:
        return {"rule": self.name, "t0": self.t0}


@dataclass(frozen=True)
class ExternalRule:
    """User-supplied step sizes t = supplier(obj, x, g, fx) in (0, cap_R].

    With ``validate`` on, each step must pass the sufficient decrease test
    for ``beta``; a failing supplied step raises StepFailure.
    """

    supplier: Callable[[Objective, ManifoldPoint, TangentVec, float], float]
    beta: float = 0.5
    cap_R: float = 1.0
    validate: bool = True
    name = "external"

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise InvariantViolation(f"beta must be in (0, 1), got {self.beta}")
        if self.cap_R < 1.0:
            raise InvariantViolation(f"cap_R must be >= 1, got {self.cap_R}")

    @property
    def certifies_decrease(self) -> bool:
        return self.validate

    def select(self, obj, x, g, fx):
        t = float(self.supplier(obj, x, g, fx))
        if not 0.0 < t <= self.cap_R:
            raise StepFailure(f"supplied step {t} outside (0, {self.cap_R}]")
        trial = obj.manifold.exp(x, g.scaled(-t))
        f_trial = obj.value(trial)
        if self.validate:
            gnorm2 = obj.manifold.inner(x, g, g)
            if f_trial > fx - self.beta * t * gnorm2 + DECREASE_SLACK:
                raise StepFailure(
                    f"supplied step {t} fails sufficient decrease at beta={self.beta}"
                )
        return t, trial, f_trial

    def info(self) -> dict:
        return {"rule": self.name, "beta": self.beta, "validate": self.validate}
