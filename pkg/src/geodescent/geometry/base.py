"""Core geometric types and the manifold interface.

Points and tangent vectors are immutable carriers of ambient coordinates
(always flat float64 arrays) tagged with the manifold they belong to.  All
actual geometry is implemented by the backends in this subpackage; the
base class wraps the raw coordinate kernels with argument checks and
post-operation renormalization so drift never accumulates across calls.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np

from ..errors import (
    BaseMismatch,
    InvariantViolation,
    ManifoldMismatch,
    TangencyViolation,
)

# Structural tolerance for point/tangency residuals after renormalization.
INVARIANT_TOL = 1e-12


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed or a Generator and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point on a manifold, stored in flat ambient coordinates."""

    manifold: "Manifold"
    coords: np.ndarray

    def close_to(self, other: "ManifoldPoint", tol: float = 1e-12) -> bool:
        return self.manifold == other.manifold and bool(
            np.allclose(self.coords, other.coords, rtol=0.0, atol=tol)
        )


@dataclass(frozen=True, eq=False)
class TangentVec:
    """A tangent vector in ambient coordinates, attached to its base point."""

    base: ManifoldPoint
    coords: np.ndarray

    @property
    def manifold(self) -> "Manifold":
        return self.base.manifold

    def scaled(self, factor: float) -> "TangentVec":
        # Scaling preserves tangency exactly; no reprojection needed.
        return TangentVec(self.base, _frozen_array(self.coords * factor))

    def plus(self, other: "TangentVec") -> "TangentVec":
        if not self.base.close_to(other.base):
            raise BaseMismatch("cannot add tangent vectors with different base points")
        return TangentVec(self.base, _frozen_array(self.coords + other.coords))


@dataclass(frozen=True)
class CurvatureBounds:
    """Sectional curvature bounds kappa_lo <= sec <= kappa_hi on a region."""

    kappa_lo: float
    kappa_hi: float

    def __post_init__(self):
        if self.kappa_lo > self.kappa_hi:
            raise InvariantViolation(
                f"curvature bounds out of order: {self.kappa_lo} > {self.kappa_hi}"
            )


@dataclass(frozen=True, eq=False)
class Ball:
    """A closed geodesic ball given by center and radius."""

    center: ManifoldPoint
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise InvariantViolation(f"ball radius must be >= 0, got {self.radius}")

    @property
    def manifold(self) -> "Manifold":
        return self.center.manifold


class Manifold(abc.ABC):
    """Closed-form Riemannian manifold backend.

    Subclasses implement the raw coordinate kernels (``_dist``, ``_exp``,
    ...); this class adds input validation, output renormalization, and
    the generic random sampling built on orthonormal tangent bases.
    """

    tag: str = ""

    def __init__(self, dim: int):
        if dim < 1:
            raise InvariantViolation(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Manifold) and (self.tag, self.dim) == (
            other.tag,
            other.dim,
        )

    def __hash__(self) -> int:
        return hash((self.tag, self.dim))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    @property
    @abc.abstractmethod
    def ambient_size(self) -> int:
        """Length of the flat coordinate array of a point."""

    # -- construction and validation --------------------------------------

    def point(self, coords) -> ManifoldPoint:
        """Wrap coordinates as a point, raising if invariants fail."""
        arr = _frozen_array(coords)
        if arr.size != self.ambient_size:
            raise InvariantViolation(
                f"{self.tag} point needs {self.ambient_size} coordinates, got {arr.size}"
            )
        defect = self._point_defect(arr)
        if not (defect <= INVARIANT_TOL):
            raise InvariantViolation(
                f"coordinates violate {self.tag} point invariants (defect {defect:.3e})"
            )
        return ManifoldPoint(self, arr)

    def project_point(self, coords) -> ManifoldPoint:
        """Project ambient coordinates onto the manifold and wrap them."""
        arr = np.asarray(coords, dtype=float).reshape(-1)
        if arr.size != self.ambient_size:
            raise InvariantViolation(
                f"{self.tag} point needs {self.ambient_size} coordinates, got {arr.size}"
            )
        return ManifoldPoint(self, _frozen_array(self._project_point(arr)))

    def tangent(self, base: ManifoldPoint, coords) -> TangentVec:
        """Wrap coordinates as a tangent vector at ``base``, validating tangency."""
        self._require_point(base)
        arr = _frozen_array(coords)
        scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 1.0)
        defect = self._tangent_defect(base.coords, arr)
        if not (defect <= INVARIANT_TOL * scale):
            raise TangencyViolation(
                f"vector is not tangent at the given {self.tag} point (defect {defect:.3e})"
            )
        return TangentVec(base, arr)

    def project_tangent(self, base: ManifoldPoint, coords) -> TangentVec:
        """Project ambient coordinates onto the tangent space at ``base``."""
        self._require_point(base)
        arr = np.asarray(coords, dtype=float).reshape(-1)
        return TangentVec(base, _frozen_array(self._project_tangent(base.coords, arr)))

    def zero_tangent(self, base: ManifoldPoint) -> TangentVec:
        self._require_point(base)
        return TangentVec(base, _frozen_array(np.zeros(self.ambient_size)))

    def _require_point(self, x: ManifoldPoint):
        if x.manifold != self:
            raise ManifoldMismatch(
                f"point on {x.manifold!r} passed to {self!r}"
            )

    def _require_based(self, x: ManifoldPoint, v: TangentVec):
        self._require_point(x)
        if v.base.manifold != self:
            raise ManifoldMismatch(f"tangent on {v.base.manifold!r} passed to {self!r}")
        if not x.close_to(v.base):
            raise BaseMismatch("tangent vector is based at a different point")

    # -- metric operations -------------------------------------------------

    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        """Geodesic distance between two points."""
        self._require_point(x)
        self._require_point(y)
        if np.array_equal(x.coords, y.coords):
            return 0.0
        return float(self._dist(x.coords, y.coords))

    def exp(self, x: ManifoldPoint, v: TangentVec) -> ManifoldPoint:
        """Exponential map: follow the geodesic with initial velocity ``v``."""
        self._require_based(x, v)
        out = self._project_point(self._exp(x.coords, v.coords))
        return ManifoldPoint(self, _frozen_array(out))

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVec:
        """Inverse exponential map: initial velocity of the minimal geodesic x -> y."""
        self._require_point(x)
        self._require_point(y)
        out = self._project_tangent(x.coords, self._log(x.coords, y.coords))
        return TangentVec(x, _frozen_array(out))

    def transport(self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVec) -> TangentVec:
        """Parallel transport of ``v`` along the minimal geodesic from x to y."""
        self._require_based(x, v)
        self._require_point(y)
        out = self._project_tangent(y.coords, self._transport(x.coords, y.coords, v.coords))
        return TangentVec(y, _frozen_array(out))

    def inner(self, x: ManifoldPoint, u: TangentVec, v: TangentVec) -> float:
        """Riemannian scalar product of two tangent vectors at ``x``."""
        self._require_based(x, u)
        self._require_based(x, v)
        return float(self._inner(x.coords, u.coords, v.coords))

    def norm(self, x: ManifoldPoint, v: TangentVec) -> float:
        return math.sqrt(max(self.inner(x, v, v), 0.0))

    def geodesic(self, x: ManifoldPoint, v: TangentVec, t: float) -> ManifoldPoint:
        """Point at parameter ``t`` on the geodesic with gamma(0)=x, gamma'(0)=v."""
        return self.exp(x, v.scaled(t))

    # -- curvature and radii ------------------------------------------------

    @abc.abstractmethod
    def curvature_bounds(self, region: Ball | None = None) -> CurvatureBounds:
        """Sectional curvature bounds valid on ``region`` (or everywhere)."""

    @abc.abstractmethod
    def injectivity_radius(self, x: ManifoldPoint | None = None) -> float:
        ...

    @abc.abstractmethod
    def convexity_radius(self, x: ManifoldPoint | None = None) -> float:
        ...

    # -- tangent frames and sampling ----------------------------------------

    def tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        """Orthonormal basis of the tangent space at ``x`` (metric inner product).

        Cached on the point: points are immutable, so the frame never changes.
        """
        self._require_point(x)
        cached = x.__dict__.get("_frame")
        if cached is None:
            cached = tuple(self._tangent_basis(x))
            object.__setattr__(x, "_frame", cached)
        return list(cached)

    def _frame_matrix(self, x: ManifoldPoint) -> np.ndarray:
        cached = x.__dict__.get("_frame_matrix")
        if cached is None:
            cached = np.array([b.coords for b in self.tangent_basis(x)])
            object.__setattr__(x, "_frame_matrix", cached)
        return cached

    @abc.abstractmethod
    def _tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        ...

    def random_tangent(self, x: ManifoldPoint, max_norm: float, seed) -> TangentVec:
        """Tangent vector drawn uniformly from the metric ball of radius ``max_norm``."""
        self._require_point(x)
        if max_norm < 0:
            raise InvariantViolation(f"max_norm must be >= 0, got {max_norm}")
        if max_norm == 0:
            return self.zero_tangent(x)
        rng = as_rng(seed)
        coeff = rng.standard_normal(self.dim)
        radius = max_norm * rng.uniform() ** (1.0 / self.dim)
        norm = np.linalg.norm(coeff)
        while norm == 0.0:  # pragma: no cover - probability zero
            coeff = rng.standard_normal(self.dim)
            norm = np.linalg.norm(coeff)
        out = (coeff * (radius / norm)) @ self._frame_matrix(x)
        return self.project_tangent(x, out)

    def random_point(self, region: Ball, seed) -> ManifoldPoint:
        """Point sampled by a uniform tangent draw in the region, pushed through exp."""
        if region.manifold != self:
            raise ManifoldMismatch("region lives on a different manifold")
        if not math.isfinite(region.radius):
            raise InvariantViolation("random_point needs a finite region radius")
        v = self.random_tangent(region.center, region.radius, seed)
        return self.exp(region.center, v)

    # -- raw kernels (flat float64 arrays in, arrays/floats out) -------------

    @abc.abstractmethod
    def _point_defect(self, coords: np.ndarray) -> float:
        """Residual of the point invariants; <= INVARIANT_TOL means valid."""

    @abc.abstractmethod
    def _tangent_defect(self, base: np.ndarray, v: np.ndarray) -> float:
        ...

    @abc.abstractmethod
    def _project_point(self, coords: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _project_tangent(self, base: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        ...

    @abc.abstractmethod
    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _transport(self, x: np.ndarray, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        ...
