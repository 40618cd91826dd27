"""Flat Euclidean space R^n."""

from __future__ import annotations

import math

import numpy as np

from .base import Ball, CurvatureBounds, Manifold, ManifoldPoint, TangentVec


class Euclidean(Manifold):
    """R^n with the standard inner product; geodesics are straight lines."""

    tag = "euclidean"

    @property
    def ambient_size(self) -> int:
        return self.dim

    def curvature_bounds(self, region: Ball | None = None) -> CurvatureBounds:
        return CurvatureBounds(0.0, 0.0)

    def injectivity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def convexity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def _tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        return [TangentVec(x, row) for row in np.eye(self.dim)]

    def _point_defect(self, coords):
        return 0.0 if np.all(np.isfinite(coords)) else math.inf

    def _tangent_defect(self, base, v):
        return 0.0 if np.all(np.isfinite(v)) else math.inf

    def _project_point(self, coords):
        return coords

    def _project_tangent(self, base, v):
        return v

    def _dist(self, x, y):
        return float(np.linalg.norm(y - x))

    def _exp(self, x, v):
        return x + v

    def _log(self, x, y):
        return y - x

    def _transport(self, x, y, v):
        return v

    def _inner(self, x, u, v):
        return float(np.dot(u, v))
