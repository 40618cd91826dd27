"""The unit sphere S^n embedded in R^{n+1}.

Distances use the chord formula ``2 asin(|x - y| / 2)`` (switching to the
antipodal chord past pi/2) instead of ``acos`` of the dot product, which
loses half the significant digits near 0 and pi.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvariantViolation, OutsideInjectivityRadius
from .base import Ball, CurvatureBounds, Manifold, ManifoldPoint, TangentVec

# log is rejected this close to the antipode; the direction is arbitrary there.
ANTIPODE_MARGIN = 1e-6


class Sphere(Manifold):
    """S^n = {x in R^{n+1} : |x| = 1} with the round metric (curvature +1)."""

    tag = "sphere"

    @property
    def ambient_size(self) -> int:
        return self.dim + 1

    def curvature_bounds(self, region: Ball | None = None) -> CurvatureBounds:
        return CurvatureBounds(1.0, 1.0)

    def injectivity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.pi

    def convexity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.pi / 2

    def _tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        xc = x.coords
        w = xc - np.eye(self.ambient_size)[0]
        ww = float(np.dot(w, w))
        if ww < 1e-24:
            frame = np.eye(self.ambient_size)[1:]
        else:
            # Householder reflection swapping e_0 and x; remaining columns
            # form an orthonormal basis of the tangent hyperplane.
            house = np.eye(self.ambient_size) - (2.0 / ww) * np.outer(w, w)
            frame = house[:, 1:].T
        return [TangentVec(x, row.copy()) for row in frame]

    def _point_defect(self, coords):
        return abs(float(np.linalg.norm(coords)) - 1.0)

    def _tangent_defect(self, base, v):
        return abs(float(np.dot(base, v)))

    def _project_point(self, coords):
        norm = float(np.linalg.norm(coords))
        if norm == 0.0:
            raise InvariantViolation("cannot project the zero vector to the sphere")
        return coords / norm

    def _project_tangent(self, base, v):
        return v - float(np.dot(base, v)) * base

    def _dist(self, x, y):
        chord = float(np.linalg.norm(x - y))
        if chord <= math.sqrt(2.0):
            return 2.0 * math.asin(min(1.0, chord / 2.0))
        anti = float(np.linalg.norm(x + y))
        return math.pi - 2.0 * math.asin(min(1.0, anti / 2.0))

    def _exp(self, x, v):
        theta = float(np.linalg.norm(v))
        if theta == 0.0:
            return x
        return math.cos(theta) * x + (math.sin(theta) / theta) * v

    def _log(self, x, y):
        d = self._dist(x, y)
        if d >= math.pi - ANTIPODE_MARGIN:
            raise OutsideInjectivityRadius(
                f"points are {d:.6f} apart, too close to antipodal on the sphere"
            )
        u = y - float(np.dot(x, y)) * x
        norm_u = float(np.linalg.norm(u))
        if norm_u == 0.0 or d == 0.0:
            return np.zeros_like(x)
        return (d / norm_u) * u

    def _transport(self, x, y, v):
        u = self._log(x, y)
        theta = float(np.linalg.norm(u))
        if theta == 0.0:
            return v
        e = u / theta
        coef = float(np.dot(e, v))
        return v + coef * ((math.cos(theta) - 1.0) * e - math.sin(theta) * x)

    def _inner(self, x, u, v):
        return float(np.dot(u, v))
