"""Hyperbolic space H^n in the hyperboloid (Lorentz) model.

Points are the upper sheet of <x, x>_L = -1 in Minkowski space R^{n,1}
with signature (-, +, ..., +).  The model gives cosh/sinh closed forms for
every operation; distances use ``2 asinh(sqrt(q)/2)`` with the Minkowski
chord q = <x - y, x - y>_L, which stays accurate for nearby points where
``acosh(-<x, y>_L)`` would lose precision.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Ball, CurvatureBounds, Manifold, ManifoldPoint, TangentVec


def minkowski(a: np.ndarray, b: np.ndarray) -> float:
    """Lorentzian scalar product with signature (-, +, ..., +)."""
    return float(np.dot(a[1:], b[1:]) - a[0] * b[0])


class Hyperboloid(Manifold):
    """H^n = {x : <x,x>_L = -1, x_0 > 0}, constant curvature -1 (Hadamard)."""

    tag = "hyperboloid"

    @property
    def ambient_size(self) -> int:
        return self.dim + 1

    def curvature_bounds(self, region: Ball | None = None) -> CurvatureBounds:
        return CurvatureBounds(-1.0, -1.0)

    def injectivity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def convexity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def base_point(self) -> ManifoldPoint:
        """The vertex (1, 0, ..., 0) of the upper sheet."""
        coords = np.zeros(self.ambient_size)
        coords[0] = 1.0
        return self.point(coords)

    def _tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        origin = np.zeros(self.ambient_size)
        origin[0] = 1.0
        if abs(x.coords[0] - 1.0) < 1e-15:
            frame = np.eye(self.ambient_size)[1:]
        else:
            # Transport the spatial frame from the vertex; transport is a
            # Minkowski isometry so orthonormality is exact.
            frame = [
                self._transport(origin, x.coords, e)
                for e in np.eye(self.ambient_size)[1:]
            ]
        return [TangentVec(x, np.array(row)) for row in frame]

    def _point_defect(self, coords):
        if coords[0] <= 0.0:
            return math.inf
        return abs(minkowski(coords, coords) + 1.0)

    def _tangent_defect(self, base, v):
        return abs(minkowski(base, v))

    def _project_point(self, coords):
        out = coords.copy()
        out[0] = math.sqrt(1.0 + float(np.dot(out[1:], out[1:])))
        return out

    def _project_tangent(self, base, v):
        return v + minkowski(base, v) * base

    def _dist(self, x, y):
        diff = x - y
        q = max(minkowski(diff, diff), 0.0)
        return 2.0 * math.asinh(0.5 * math.sqrt(q))

    def _norm(self, v):
        return math.sqrt(max(minkowski(v, v), 0.0))

    def _exp(self, x, v):
        theta = self._norm(v)
        if theta < 1e-9:
            # sinh(t)/t to machine precision near zero
            return math.cosh(theta) * x + (1.0 + theta * theta / 6.0) * v
        return math.cosh(theta) * x + (math.sinh(theta) / theta) * v

    def _log(self, x, y):
        d = self._dist(x, y)
        if d == 0.0:
            return np.zeros_like(x)
        alpha = -minkowski(x, y)
        u = y - alpha * x
        norm_u = self._norm(u)  # equals sinh(d) up to rounding
        if norm_u == 0.0:
            return np.zeros_like(x)
        return (d / norm_u) * u

    def _transport(self, x, y, v):
        alpha = -minkowski(x, y)
        coef = minkowski(y, v) / (alpha + 1.0)
        return v + coef * (x + y)

    def _inner(self, x, u, v):
        return minkowski(u, v)
