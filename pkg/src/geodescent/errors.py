"""Exception types shared across the library."""


class GeodescentError(Exception):
    """Base class for every library-specific error."""


class ManifoldMismatch(GeodescentError):
    """Two arguments live on different manifolds."""


class BaseMismatch(GeodescentError):
    """A tangent vector is based at a different point than required."""


class TangencyViolation(GeodescentError):
    """A vector fails the tangency residual tolerance of its manifold."""


class InvariantViolation(GeodescentError):
    """A point or data set breaks a structural invariant (norm, weights...)."""


class OutsideInjectivityRadius(GeodescentError):
    """log/transport requested beyond the injectivity radius (e.g. antipodes)."""


class NegativeArgument(GeodescentError):
    """A nonnegative scalar argument was negative."""


class RangeViolation(GeodescentError):
    """A scalar argument is outside the admissible range of a formula."""


class DomainExit(GeodescentError):
    """An evaluation point left the objective's domain."""


class OutsideDomain(GeodescentError):
    """The query point is outside the objective's domain."""


class RegionTooLarge(GeodescentError):
    """A probe region exceeds the convexity radius of its center."""


class NegativeGap(GeodescentError):
    """A sampled value lies below the reference minimum: not a minimizer."""


class ZeroGradient(GeodescentError):
    """A step-size rule was queried with a vanishing gradient."""


class ExhaustedHalvings(GeodescentError):
    """Backtracking ran out of halvings without sufficient decrease."""


class StepFailure(GeodescentError):
    """No admissible step size could be produced for an iterate."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularIterate(GeodescentError):
    """An iterate collided with a data point where the cost is nonsmooth."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InvalidStart(GeodescentError):
    """The initial point is outside the domain of the objective."""


class LengthMismatch(GeodescentError):
    """An auxiliary array does not match the trace length."""


class InsufficientData(GeodescentError):
    """Too few iterates for the requested fit or statistic."""


class ZeroDistance(GeodescentError):
    """Iterates are numerically at the reference point; nothing to fit."""


class ValidationFailure(GeodescentError):
    """A problem configuration failed a hard admissibility condition."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(GeodescentError):
    """A dataset, trace, or config file could not be parsed."""
