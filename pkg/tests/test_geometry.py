import math

import numpy as np
import pytest
import scipy.linalg

import geodescent as gd
from geodescent.errors import (
    BaseMismatch,
    InvariantViolation,
    ManifoldMismatch,
    OutsideInjectivityRadius,
    TangencyViolation,
)

from conftest import base_point


# -- distances ---------------------------------------------------------------


def test_dist_orthogonal_unit_vectors_on_sphere():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    y = man.point([0.0, 1.0, 0.0])
    assert man.dist(x, y) == pytest.approx(math.pi / 2, abs=1e-15)


def test_dist_unit_speed_geodesic_on_hyperboloid():
    man = gd.Hyperboloid(2)
    x = man.point([1.0, 0.0, 0.0])
    y = man.point([math.cosh(1.0), math.sinh(1.0), 0.0])
    assert man.dist(x, y) == pytest.approx(1.0, abs=1e-14)


def test_dist_euclidean_3_4_5():
    man = gd.Euclidean(2)
    assert man.dist(man.point([0.0, 0.0]), man.point([3.0, 4.0])) == 5.0


def test_dist_requires_same_manifold():
    a = gd.Euclidean(2).point([0.0, 0.0])
    b = gd.Euclidean(3).point([0.0, 0.0, 0.0])
    with pytest.raises(ManifoldMismatch):
        gd.Euclidean(2).dist(a, b)


# -- exp ----------------------------------------------------------------------


def test_exp_of_zero_is_identity(manifold, base):
    out = manifold.exp(base, manifold.zero_tangent(base))
    np.testing.assert_allclose(out.coords, base.coords, rtol=0, atol=1e-15)


def test_exp_reaches_antipode_on_sphere():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    v = man.tangent(x, [0.0, 1.0, 0.0])
    y = man.exp(x, v.scaled(math.pi))
    np.testing.assert_allclose(y.coords, -x.coords, atol=1e-15)


def test_exp_at_identity_is_matrix_exponential_on_spd():
    man = gd.SPD(3)
    eye = man.identity_point()
    rng = np.random.default_rng(0)
    sym = rng.standard_normal((3, 3))
    sym = 0.5 * (sym + sym.T)
    out = man.exp(eye, man.tangent(eye, sym.reshape(-1)))
    np.testing.assert_allclose(
        out.coords.reshape(3, 3), scipy.linalg.expm(sym), atol=1e-12
    )


# -- log ----------------------------------------------------------------------


def test_log_of_same_point_is_zero(manifold, base):
    v = manifold.log(base, base)
    assert manifold.norm(base, v) == 0.0


def test_log_euclidean_is_difference():
    man = gd.Euclidean(2)
    v = man.log(man.point([1.0, 1.0]), man.point([2.0, 3.0]))
    np.testing.assert_array_equal(v.coords, [1.0, 2.0])


def test_log_sphere_quarter_turn():
    # orthogonal targets: the initial velocity points along y with length pi/2
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    y = man.point([0.0, 1.0, 0.0])
    v = man.log(x, y)
    np.testing.assert_allclose(v.coords, [0.0, math.pi / 2, 0.0], atol=1e-15)
    np.testing.assert_allclose(man.exp(x, v).coords, y.coords, atol=1e-12)


def test_log_rejects_antipodal_points():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    with pytest.raises(OutsideInjectivityRadius):
        man.log(x, man.point([-1.0, 0.0, 0.0]))


# -- parallel transport --------------------------------------------------------


def test_transport_to_same_point_is_identity(manifold, base):
    v = manifold.random_tangent(base, 0.7, 11)
    out = manifold.transport(base, base, v)
    np.testing.assert_allclose(out.coords, v.coords, atol=1e-14)


def test_transport_euclidean_keeps_coords():
    man = gd.Euclidean(3)
    x, y = man.point([0.0, 0.0, 0.0]), man.point([5.0, -1.0, 2.0])
    v = man.tangent(x, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(man.transport(x, y, v).coords, v.coords)


@pytest.mark.parametrize("tag", ["sphere", "hyperboloid"])
def test_transport_carries_geodesic_velocity(tag):
    # P_{y,x} gamma'(0) must equal gamma'(d); the oracle differentiates exp
    # in ambient coordinates with a central difference.
    man = gd.Sphere(2) if tag == "sphere" else gd.Hyperboloid(2)
    rng = np.random.default_rng(3)
    x = man.random_point(gd.Ball(base_point(man), 0.8), rng)
    e = man.random_tangent(x, 1.0, rng)
    e = e.scaled(1.0 / man.norm(x, e))
    d = 0.9
    y = man.exp(x, e.scaled(d))
    transported = man.transport(x, y, e)
    h = 1e-6
    plus = man.exp(x, e.scaled(d + h)).coords
    minus = man.exp(x, e.scaled(d - h)).coords
    velocity = (plus - minus) / (2.0 * h)
    np.testing.assert_allclose(transported.coords, velocity, atol=1e-6)


# -- inner product ---------------------------------------------------------------


def test_inner_with_zero_vanishes(manifold, base):
    v = manifold.random_tangent(base, 1.0, 5)
    assert manifold.inner(base, v, manifold.zero_tangent(base)) == 0.0


def test_inner_euclidean_orthogonal():
    man = gd.Euclidean(2)
    x = man.point([0.0, 0.0])
    u = man.tangent(x, [1.0, 0.0])
    v = man.tangent(x, [0.0, 1.0])
    assert man.inner(x, u, v) == 0.0


def test_inner_spd_is_trace_form():
    # at the identity: tr(I^-1 U I^-1 V) = tr(U V); U = V = I gives n
    man = gd.SPD(2)
    eye = man.identity_point()
    u = man.tangent(eye, np.eye(2).reshape(-1))
    assert man.inner(eye, u, u) == pytest.approx(2.0, abs=1e-15)


def test_inner_rejects_foreign_base(manifold, base):
    other = manifold.exp(base, manifold.random_tangent(base, 0.5, 1))
    v = manifold.random_tangent(other, 0.5, 2)
    with pytest.raises(BaseMismatch):
        manifold.inner(base, v, v)


# -- curvature and radii -----------------------------------------------------------


def test_curvature_bounds_per_backend():
    assert gd.Euclidean(3).curvature_bounds() == gd.CurvatureBounds(0.0, 0.0)
    assert gd.Hyperboloid(4).curvature_bounds() == gd.CurvatureBounds(-1.0, -1.0)
    assert gd.Sphere(3).curvature_bounds() == gd.CurvatureBounds(1.0, 1.0)
    assert gd.SPD(3).curvature_bounds() == gd.CurvatureBounds(-0.5, 0.0)


def test_radii_per_backend():
    for man in (gd.Euclidean(3), gd.Hyperboloid(2), gd.SPD(3)):
        assert man.injectivity_radius() == math.inf
        assert man.convexity_radius() == math.inf
    sphere = gd.Sphere(2)
    assert sphere.injectivity_radius() == math.pi
    assert sphere.convexity_radius() == math.pi / 2


# -- random sampling -----------------------------------------------------------------


def test_random_point_deterministic_under_seed(manifold, base):
    ball = gd.Ball(base, 0.9)
    a = manifold.random_point(ball, 1234)
    b = manifold.random_point(ball, 1234)
    np.testing.assert_array_equal(a.coords, b.coords)


def test_random_tangent_zero_norm_is_zero(manifold, base):
    v = manifold.random_tangent(base, 0.0, 7)
    assert np.all(v.coords == 0.0)


def test_random_points_stay_in_ball(manifold, base):
    n = 10_000 if manifold.tag != "spd" else 3000
    radius = 0.8
    ball = gd.Ball(base, radius)
    rng = np.random.default_rng(99)
    for _ in range(n):
        x = manifold.random_point(ball, rng)
        assert manifold.dist(base, x) <= radius + 1e-9


def test_tangent_basis_is_orthonormal(manifold, base):
    rng = np.random.default_rng(17)
    x = manifold.random_point(gd.Ball(base, 1.0), rng)
    basis = manifold.tangent_basis(x)
    assert len(basis) == manifold.dim
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            expected = 1.0 if i == j else 0.0
            assert manifold.inner(x, u, v) == pytest.approx(expected, abs=1e-12)


# -- structural validation ------------------------------------------------------------


def test_point_constructor_rejects_bad_coords():
    with pytest.raises(InvariantViolation):
        gd.Sphere(2).point([1.0, 0.1, 0.0])  # not unit norm
    with pytest.raises(InvariantViolation):
        gd.Hyperboloid(2).point([-1.0, 0.0, 0.0])  # lower sheet
    with pytest.raises(InvariantViolation):
        gd.SPD(2).point([1.0, 0.5, 0.4, 1.0])  # asymmetric
    with pytest.raises(InvariantViolation):
        gd.SPD(2).point([1.0, 2.0, 2.0, 1.0])  # indefinite


def test_tangent_constructor_rejects_non_tangent():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    with pytest.raises(TangencyViolation):
        man.tangent(x, [0.5, 1.0, 0.0])  # radial component


# -- metric properties (seeded sweeps) --------------------------------------------------


def test_exp_log_round_trip(manifold, base):
    rng = np.random.default_rng(21)
    cap = min(1.0, 0.4 * manifold.injectivity_radius())
    for _ in range(1000):
        x = manifold.random_point(gd.Ball(base, 1.2), rng)
        v = manifold.random_tangent(x, cap, rng)
        w = manifold.log(x, manifold.exp(x, v))
        err = np.linalg.norm(w.coords - v.coords)
        assert err <= 1e-9 * (1.0 + manifold.norm(x, v))


def test_dist_equals_tangent_norm(manifold, base):
    rng = np.random.default_rng(22)
    cap = min(1.0, 0.4 * manifold.injectivity_radius())
    for _ in range(1000):
        x = manifold.random_point(gd.Ball(base, 1.2), rng)
        v = manifold.random_tangent(x, cap, rng)
        assert abs(manifold.dist(x, manifold.exp(x, v)) - manifold.norm(x, v)) <= 1e-10


def test_transport_is_isometry(manifold, base):
    rng = np.random.default_rng(23)
    for _ in range(500):
        x = manifold.random_point(gd.Ball(base, 1.0), rng)
        y = manifold.random_point(gd.Ball(base, 1.0), rng)
        v = manifold.random_tangent(x, 1.0, rng)
        nv = manifold.norm(x, v)
        moved = manifold.norm(y, manifold.transport(x, y, v))
        assert abs(moved - nv) <= 1e-10 * max(nv, 1e-30)


def test_point_invariants_preserved_by_ops(manifold, base):
    rng = np.random.default_rng(24)
    for _ in range(300):
        x = manifold.random_point(gd.Ball(base, 1.2), rng)
        v = manifold.random_tangent(x, 1.0, rng)
        y = manifold.exp(x, v)
        assert manifold._point_defect(y.coords) <= 1e-12
        w = manifold.transport(x, y, v)
        assert manifold._tangent_defect(y.coords, w.coords) <= 1e-12


def test_triangle_inequality(manifold, base):
    rng = np.random.default_rng(25)
    n = 10_000 if manifold.tag != "spd" else 4000
    for _ in range(n):
        x = manifold.random_point(gd.Ball(base, 1.2), rng)
        y = manifold.random_point(gd.Ball(base, 1.2), rng)
        z = manifold.random_point(gd.Ball(base, 1.2), rng)
        assert manifold.dist(x, z) <= manifold.dist(x, y) + manifold.dist(y, z) + 1e-9


def test_dist_symmetry_and_identity(manifold, base):
    rng = np.random.default_rng(26)
    for _ in range(200):
        x = manifold.random_point(gd.Ball(base, 1.2), rng)
        y = manifold.random_point(gd.Ball(base, 1.2), rng)
        assert manifold.dist(x, y) == pytest.approx(manifold.dist(y, x), abs=1e-12)
        assert manifold.dist(x, x) == 0.0
