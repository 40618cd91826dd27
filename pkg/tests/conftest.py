import math

import numpy as np
import pytest

import geodescent as gd

BACKENDS = [gd.Euclidean(3), gd.Sphere(2), gd.Hyperboloid(2), gd.SPD(3)]


def base_point(man):
    if man.tag == "euclidean":
        return man.point(np.zeros(man.dim))
    if man.tag == "sphere":
        coords = np.zeros(man.ambient_size)
        coords[0] = 1.0
        return man.point(coords)
    if man.tag == "hyperboloid":
        return man.base_point()
    return man.identity_point()


@pytest.fixture(params=BACKENDS, ids=lambda m: m.tag)
def manifold(request):
    return request.param


@pytest.fixture
def base(manifold):
    return base_point(manifold)


def quadratic_objective(man):
    """f(x) = 0.5 |x|^2 on Euclidean space; gradient is x itself."""
    assert man.tag == "euclidean"
    return gd.Objective(
        manifold=man,
        value=lambda p: 0.5 * float(np.dot(p.coords, p.coords)),
        gradient=lambda p: man.tangent(p, p.coords),
        lower_bound=0.0,
    )


def random_problem(man, n_points=4, p=2.0, seed=0, spread=None, weights="equal"):
    """Admissible random center-of-mass fixture around the canonical base point."""
    rng = np.random.default_rng(seed)
    o = base_point(man)
    if man.tag == "sphere":
        radius = (math.pi / 4 if p < 2.0 else math.pi / 2) * 0.95
        spread = radius / 3.2 if spread is None else spread
    else:
        radius = math.inf
        spread = 1.0 if spread is None else spread
    pts = tuple(man.random_point(gd.Ball(o, spread), rng) for _ in range(n_points))
    if weights == "equal":
        data = gd.WeightedPoints.equal_weights(pts)
    else:
        w = rng.uniform(0.5, 1.5, n_points)
        data = gd.WeightedPoints(pts, w / math.fsum(w))
    return gd.MassProblem(data, p, o, radius)
