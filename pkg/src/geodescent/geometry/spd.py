"""Symmetric positive definite matrices with the affine-invariant metric.

Points are n x n SPD matrices stored as flat length-n^2 arrays; tangent
vectors are symmetric matrices in the same layout.  The metric is
g_X(U, V) = tr(X^-1 U X^-1 V), under which SPD(n) is a Hadamard manifold.
All matrix functions go through symmetric eigendecompositions.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from ..errors import InvariantViolation
from .base import Ball, CurvatureBounds, Manifold, ManifoldPoint, TangentVec


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _eig_apply(a: np.ndarray, fn) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    return vecs @ np.diag(fn(vals)) @ vecs.T


class SPD(Manifold):
    """SPD(n) under the affine-invariant metric (curvature in [-1/2, 0])."""

    tag = "spd"

    def __init__(self, n: int):
        self.n = int(n)
        super().__init__(dim=self.n * (self.n + 1) // 2)

    def __repr__(self) -> str:
        return f"SPD(n={self.n})"

    @property
    def ambient_size(self) -> int:
        return self.n * self.n

    def _mat(self, coords: np.ndarray) -> np.ndarray:
        return coords.reshape(self.n, self.n)

    def curvature_bounds(self, region: Ball | None = None) -> CurvatureBounds:
        return CurvatureBounds(-0.5, 0.0)

    def injectivity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def convexity_radius(self, x: ManifoldPoint | None = None) -> float:
        return math.inf

    def identity_point(self) -> ManifoldPoint:
        return self.point(np.eye(self.n).reshape(-1))

    def _tangent_basis(self, x: ManifoldPoint) -> list[TangentVec]:
        root = _eig_apply(self._mat(x.coords), np.sqrt)
        basis = []
        for i in range(self.n):
            for j in range(i, self.n):
                seed = np.zeros((self.n, self.n))
                if i == j:
                    seed[i, i] = 1.0
                else:
                    seed[i, j] = seed[j, i] = 1.0 / math.sqrt(2.0)
                basis.append(TangentVec(x, (root @ seed @ root).reshape(-1)))
        return basis

    def _point_defect(self, coords):
        a = self._mat(coords)
        asym = float(np.max(np.abs(a - a.T)))
        min_eig = float(np.linalg.eigvalsh(_sym(a))[0])
        if min_eig <= 0.0:
            return math.inf
        return asym

    def _tangent_defect(self, base, v):
        m = self._mat(v)
        return float(np.max(np.abs(m - m.T)))

    def _project_point(self, coords):
        a = _sym(self._mat(coords))
        if float(np.linalg.eigvalsh(a)[0]) <= 0.0:
            raise InvariantViolation("matrix is not positive definite")
        return a.reshape(-1)

    def _project_tangent(self, base, v):
        return _sym(self._mat(v)).reshape(-1)

    def _roots(self, a: np.ndarray):
        vals, vecs = np.linalg.eigh(a)
        if vals[0] <= 0.0:
            raise InvariantViolation("matrix is not positive definite")
        sq = np.sqrt(vals)
        return vecs @ np.diag(sq) @ vecs.T, vecs @ np.diag(1.0 / sq) @ vecs.T

    def _dist(self, x, y):
        # Generalized eigenvalues of (Y, X) equal those of X^-1/2 Y X^-1/2.
        vals = scipy.linalg.eigvalsh(self._mat(y), self._mat(x))
        return float(np.linalg.norm(np.log(vals)))

    def _exp(self, x, v):
        root, inv_root = self._roots(self._mat(x))
        inner = _sym(inv_root @ self._mat(v) @ inv_root)
        return _sym(root @ _eig_apply(inner, np.exp) @ root).reshape(-1)

    def _log(self, x, y):
        root, inv_root = self._roots(self._mat(x))
        middle = _sym(inv_root @ self._mat(y) @ inv_root)
        return _sym(root @ _eig_apply(middle, np.log) @ root).reshape(-1)

    def _transport(self, x, y, v):
        root, inv_root = self._roots(self._mat(x))
        middle = _sym(inv_root @ self._mat(y) @ inv_root)
        carrier = root @ _eig_apply(middle, np.sqrt) @ inv_root
        return _sym(carrier @ self._mat(v) @ carrier.T).reshape(-1)

    def _inner(self, x, u, v):
        xm = self._mat(x)
        a = np.linalg.solve(xm, self._mat(u))
        b = np.linalg.solve(xm, self._mat(v))
        return float(np.sum(a * b.T))
