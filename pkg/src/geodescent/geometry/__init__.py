"""Manifold backends and geometric value types."""

from __future__ import annotations

from ..errors import InvariantViolation
from .base import (
    INVARIANT_TOL,
    Ball,
    CurvatureBounds,
    Manifold,
    ManifoldPoint,
    TangentVec,
    as_rng,
)
from .euclidean import Euclidean
from .hyperboloid import Hyperboloid, minkowski
from .sphere import Sphere
from .spd import SPD

_BACKENDS = {
    "euclidean": Euclidean,
    "sphere": Sphere,
    "hyperboloid": Hyperboloid,
    "spd": SPD,
}


def get_manifold(tag: str, dim: int) -> Manifold:
    """Build a backend by tag.

    ``dim`` is the intrinsic dimension for euclidean/sphere/hyperboloid and
    the matrix size n for spd.
    """
    try:
        cls = _BACKENDS[tag.lower()]
    except KeyError:
        raise InvariantViolation(
            f"unknown manifold tag {tag!r}; expected one of {sorted(_BACKENDS)}"
        ) from None
    return cls(dim)


def manifold_tags() -> list[str]:
    return sorted(_BACKENDS)


__all__ = [
    "Ball",
    "CurvatureBounds",
    "Euclidean",
    "Hyperboloid",
    "INVARIANT_TOL",
    "Manifold",
    "ManifoldPoint",
    "SPD",
    "Sphere",
    "TangentVec",
    "as_rng",
    "get_manifold",
    "manifold_tags",
    "minkowski",
]
