"""geodescent: geodesic gradient descent and L^p centers of mass on manifolds.

Four closed-form manifold backends (Euclidean space, the sphere, hyperbolic
space in the hyperboloid model, and SPD matrices under the affine-invariant
metric) feed a gradient-descent driver with Armijo, constant, or external
step-size rules.  On top sit the weighted L^p center-of-mass solver with
its admissibility validators and a numerical verification suite for the
comparison inequalities that underpin the convergence guarantees.
"""

from . import errors
from .calculus import (
    Location,
    Objective,
    ProbeReport,
    convexity_probe,
    estimate_gradient_lipschitz,
    estimate_sharpness,
    finite_diff_gradient_check,
    quasi_convexity_probe,
    second_directional_derivative,
    tanh_ratio,
)
from .descent import (
    IterateTrace,
    RateFit,
    StopCriteria,
    TraceStatus,
    constant_step_descent,
    estimate_linear_rate,
    gradient_descent,
    quasi_fejer_check,
    quasi_fejer_margins,
)
from .frechet import (
    CenterResult,
    MassProblem,
    ValidationReport,
    WeightedPoints,
    admissible_radius_bound,
    auto_constant_rule,
    center_of_mass,
    distance_second_derivative_bound,
    estimate_hessian_bound,
    is_collinear,
    validate_configuration,
)
from .geometry import (
    Ball,
    CurvatureBounds,
    Euclidean,
    Hyperboloid,
    Manifold,
    ManifoldPoint,
    SPD,
    Sphere,
    TangentVec,
    get_manifold,
    manifold_tags,
)
from .stepsize import (
    ArmijoRule,
    ConstantRule,
    ExternalRule,
    armijo_step,
    armijo_step_floor,
    sufficient_decrease_check,
)

__version__ = "0.1.0"

__all__ = [
    "ArmijoRule",
    "Ball",
    "CenterResult",
    "ConstantRule",
    "CurvatureBounds",
    "Euclidean",
    "ExternalRule",
    "Hyperboloid",
    "IterateTrace",
    "Location",
    "Manifold",
    "ManifoldPoint",
    "MassProblem",
    "Objective",
    "ProbeReport",
    "RateFit",
    "SPD",
    "Sphere",
    "StopCriteria",
    "TangentVec",
    "TraceStatus",
    "ValidationReport",
    "WeightedPoints",
    "admissible_radius_bound",
    "armijo_step",
    "armijo_step_floor",
    "auto_constant_rule",
    "center_of_mass",
    "constant_step_descent",
    "convexity_probe",
    "distance_second_derivative_bound",
    "errors",
    "estimate_gradient_lipschitz",
    "estimate_hessian_bound",
    "estimate_linear_rate",
    "estimate_sharpness",
    "finite_diff_gradient_check",
    "get_manifold",
    "gradient_descent",
    "is_collinear",
    "manifold_tags",
    "quasi_convexity_probe",
    "quasi_fejer_check",
    "quasi_fejer_margins",
    "second_directional_derivative",
    "sufficient_decrease_check",
    "tanh_ratio",
    "validate_configuration",
]
