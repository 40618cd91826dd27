import math

import numpy as np
import pytest

import geodescent as gd
from geodescent.errors import (
    InvariantViolation,
    OutsideDomain,
    RangeViolation,
    SingularIterate,
    ValidationFailure,
)

from conftest import base_point, random_problem


def weiszfeld_oracle(points, weights, x0, iters=500):
    """Independent fixed-point iteration for the Euclidean geometric median."""
    x = np.array(x0, dtype=float)
    for _ in range(iters):
        d = np.linalg.norm(points - x, axis=1)
        assert np.all(d > 1e-13), "oracle hit a data point"
        wd = weights / d
        x = (wd[:, None] * points).sum(axis=0) / wd.sum()
    return x


# -- data set validation --------------------------------------------------------


def test_weighted_points_validation():
    man = gd.Euclidean(2)
    a, b = man.point([0.0, 0.0]), man.point([1.0, 0.0])
    with pytest.raises(InvariantViolation):
        gd.WeightedPoints((a,), np.array([1.0]))  # too few points
    with pytest.raises(InvariantViolation):
        gd.WeightedPoints((a, b), np.array([0.0, 1.0]))  # weight not in (0,1)
    with pytest.raises(InvariantViolation):
        gd.WeightedPoints((a, b), np.array([0.6, 0.6]))  # sum != 1
    data = gd.WeightedPoints.equal_weights((a, b))
    assert math.fsum(data.weights) == 1.0


# -- cost values ------------------------------------------------------------------


def test_value_zero_when_all_data_coincide_at_x(manifold, base):
    data = gd.WeightedPoints.equal_weights((base, base))
    prob = gd.MassProblem(data, 2.0, base, radius=1.0)
    assert prob.value(base) == 0.0


def test_value_symmetric_two_point_instance():
    man = gd.Euclidean(2)
    data = gd.WeightedPoints.equal_weights(
        (man.point([1.0, 0.0]), man.point([-1.0, 0.0]))
    )
    prob = gd.MassProblem(data, 2.0, man.point([0.0, 0.0]))
    assert prob.value(man.point([0.0, 0.0])) == 0.5


def test_value_infinite_outside_domain_ball():
    man = gd.Euclidean(2)
    data = gd.WeightedPoints.equal_weights(
        (man.point([0.1, 0.0]), man.point([-0.1, 0.0]))
    )
    prob = gd.MassProblem(data, 2.0, man.point([0.0, 0.0]), radius=1.0)
    assert prob.value(man.point([2.0, 0.0])) == math.inf
    assert prob.domain(man.point([2.0, 0.0])) == gd.Location.OUTSIDE


# -- gradients ---------------------------------------------------------------------


def test_gradient_vanishes_at_symmetric_center_euclidean():
    man = gd.Euclidean(2)
    data = gd.WeightedPoints.equal_weights(
        (man.point([1.0, 0.0]), man.point([-1.0, 0.0]))
    )
    prob = gd.MassProblem(data, 2.0, man.point([0.0, 0.0]))
    g = prob.gradient(man.point([0.0, 0.0]))
    np.testing.assert_array_equal(g.coords, [0.0, 0.0])


def test_gradient_vanishes_at_sphere_midpoint():
    man = gd.Sphere(2)
    y1 = man.point([1.0, 0.0, 0.0])
    y2 = man.exp(y1, man.tangent(y1, [0.0, 1.0, 0.0]))
    mid = man.exp(y1, man.log(y1, y2).scaled(0.5))
    prob = gd.MassProblem(
        gd.WeightedPoints.equal_weights((y1, y2)), 2.0, y1, radius=1.5
    )
    assert man.norm(mid, prob.gradient(mid)) <= 1e-14


def test_gradient_matches_finite_differences_all_p(manifold):
    rng = np.random.default_rng(61)
    for p in (1.0, 1.5, 2.0, 3.0):
        prob = random_problem(manifold, n_points=4, p=p, seed=62)
        man = prob.manifold
        obj = prob.as_objective()
        checked = 0
        while checked < 10:
            x = man.random_point(gd.Ball(prob.anchor, 0.35), rng)
            if p < 2.0 and min(man.dist(x, y) for y in prob.data.points) < 0.05:
                continue
            assert gd.finite_diff_gradient_check(obj, x) <= 1e-6
            checked += 1


def test_gradient_raises_on_near_collision_for_small_p():
    man = gd.Euclidean(2)
    y1, y2 = man.point([0.0, 0.0]), man.point([1.0, 0.0])
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights((y1, y2)), 1.0, y1)
    with pytest.raises(SingularIterate):
        prob.gradient(man.point([1e-12, 0.0]))
    with pytest.raises(SingularIterate):
        prob.gradient(y1)  # exact collision at p = 1


def test_gradient_drops_exact_collision_term_for_mid_p():
    # at p in (1, 2) an exact hit contributes nothing and the rest is smooth
    man = gd.Euclidean(2)
    y1, y2 = man.point([0.0, 0.0]), man.point([1.0, 0.0])
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights((y1, y2)), 1.5, y1)
    g = prob.gradient(y1)
    assert np.all(np.isfinite(g.coords))


def test_gradient_outside_domain_raises():
    man = gd.Euclidean(2)
    data = gd.WeightedPoints.equal_weights(
        (man.point([0.1, 0.0]), man.point([-0.1, 0.0]))
    )
    prob = gd.MassProblem(data, 2.0, man.point([0.0, 0.0]), radius=0.5)
    with pytest.raises(OutsideDomain):
        prob.gradient(man.point([2.0, 0.0]))


# -- admissible radius bound ----------------------------------------------------------


def test_radius_bound_infinite_on_hadamard_backends():
    for man in (gd.Euclidean(3), gd.Hyperboloid(2), gd.SPD(3)):
        cap = gd.admissible_radius_bound(
            2.0, 1.0, man.curvature_bounds(), man.injectivity_radius()
        )
        assert cap == math.inf


def test_radius_bound_on_sphere_both_regimes():
    man = gd.Sphere(2)
    bounds, r_inj = man.curvature_bounds(), man.injectivity_radius()
    assert gd.admissible_radius_bound(1.5, 1.0, bounds, r_inj) == pytest.approx(
        math.pi / 4
    )
    assert gd.admissible_radius_bound(2.0, 1.0, bounds, r_inj) == pytest.approx(
        math.pi / 2
    )


def test_radius_bound_non_increasing_in_radius(manifold):
    bounds = manifold.curvature_bounds()
    r_inj = manifold.injectivity_radius()
    grid = np.linspace(0.1, 3.0, 30)
    vals = [gd.admissible_radius_bound(2.0, r, bounds, r_inj) for r in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


# -- configuration validation ------------------------------------------------------------


def test_validation_passes_with_infinite_radius_on_hadamard():
    prob = random_problem(gd.Hyperboloid(2), seed=63)
    report = gd.validate_configuration(prob)
    assert report.get("radius_bound").passed
    assert report.hard_pass


def test_validation_passes_on_admissible_sphere_setup():
    man = gd.Sphere(2)
    north = man.point([0.0, 0.0, 1.0])
    rng = np.random.default_rng(64)
    pts = tuple(man.random_point(gd.Ball(north, math.pi / 2 - 0.15), rng) for _ in range(4))
    prob = gd.MassProblem(
        gd.WeightedPoints.equal_weights(pts), 2.0, north, radius=math.pi / 2 - 0.05
    )
    report = gd.validate_configuration(prob)
    assert report.get("radius_bound").passed
    assert report.suggested_radius_max == pytest.approx(math.pi / 2)


def test_validation_rejects_infinite_radius_on_sphere():
    man = gd.Sphere(2)
    north = man.point([0.0, 0.0, 1.0])
    rng = np.random.default_rng(65)
    pts = tuple(man.random_point(gd.Ball(north, 0.3), rng) for _ in range(3))
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights(pts), 2.0, north)
    report = gd.validate_configuration(prob)
    assert report.get("radius_bound").passed is False
    assert not report.hard_pass


def test_validation_flags_collinear_median_data():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    e = man.tangent(x, [0.0, 1.0, 0.0])
    pts = tuple(man.exp(x, e.scaled(t)) for t in (0.0, 0.2, 0.5))
    prob = gd.MassProblem(
        gd.WeightedPoints.equal_weights(pts), 1.0, x, radius=math.pi / 4 - 0.01
    )
    report = gd.validate_configuration(prob, x0=man.exp(x, e.scaled(0.25)))
    assert report.get("non_collinear").passed is False
    with pytest.raises(ValidationFailure):
        gd.center_of_mass(prob, x0=man.exp(x, e.scaled(0.25)))


# -- collinearity --------------------------------------------------------------------


def test_two_points_are_always_collinear():
    man = gd.Euclidean(3)
    data = gd.WeightedPoints.equal_weights(
        (man.point([0.0, 0.0, 0.0]), man.point([1.0, 2.0, 3.0]))
    )
    assert gd.is_collinear(data)


def test_collinear_euclidean_points():
    man = gd.Euclidean(2)
    pts = tuple(man.point([t, 0.0]) for t in (0.0, 1.0, 2.0))
    assert gd.is_collinear(gd.WeightedPoints.equal_weights(pts))


def test_displaced_sphere_point_is_not_collinear():
    man = gd.Sphere(2)
    x = man.point([1.0, 0.0, 0.0])
    e1 = man.tangent(x, [0.0, 1.0, 0.0])
    e2 = man.tangent(x, [0.0, 0.0, 1.0])
    pts = (x, man.exp(x, e1.scaled(0.5)), man.exp(x, e1.scaled(0.25).plus(e2.scaled(0.1))))
    assert not gd.is_collinear(gd.WeightedPoints.equal_weights(pts))


# -- Hessian bound estimation ------------------------------------------------------------


def test_hessian_bound_euclidean_quadratic_case():
    prob = random_problem(gd.Euclidean(3), n_points=4, p=2.0, seed=66)
    lam = gd.estimate_hessian_bound(prob, prob.anchor, samples=64, seed=67)
    assert 0.99 <= lam <= 1.11


def test_hessian_bound_hyperbolic_respects_comparison_bound():
    man = gd.Hyperboloid(2)
    base = man.base_point()
    rng = np.random.default_rng(68)
    pts = tuple(man.random_point(gd.Ball(base, 1.0), rng) for _ in range(3))
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights(pts), 2.0, base)
    lam = gd.estimate_hessian_bound(prob, base, samples=64, seed=69)
    assert lam <= 1.1 * 2.0 / math.tanh(2.0)
    assert lam >= 1.0  # Hessian of each 0.5 d^2 term dominates the metric


def test_hessian_bound_for_coincident_data_is_one():
    man = gd.Euclidean(2)
    y = man.point([0.3, -0.2])
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights((y, y)), 2.0, man.point([0.0, 0.0]))
    lam = gd.estimate_hessian_bound(prob, man.point([0.0, 0.0]), samples=32, seed=70)
    assert lam == pytest.approx(1.0, abs=1e-6)


# -- distance-Hessian comparison term ------------------------------------------------------


def test_comparison_term_flat_case():
    assert gd.distance_second_derivative_bound(0.0, 2.0) == 0.5


def test_comparison_term_positive_curvature():
    assert gd.distance_second_derivative_bound(1.0, math.pi / 4) == pytest.approx(1.0)


def test_comparison_term_negative_curvature_limit():
    assert gd.distance_second_derivative_bound(-1.0, 50.0) == pytest.approx(1.0, abs=1e-12)


def test_comparison_term_range_violation():
    with pytest.raises(RangeViolation):
        gd.distance_second_derivative_bound(1.0, math.pi)
    with pytest.raises(RangeViolation):
        gd.distance_second_derivative_bound(0.0, 0.0)


# -- end-to-end solves --------------------------------------------------------------------


def test_center_euclidean_p2_is_weighted_mean():
    man = gd.Euclidean(3)
    rng = np.random.default_rng(71)
    pts = tuple(man.point(rng.standard_normal(3)) for _ in range(6))
    w = rng.uniform(0.5, 1.5, 6)
    w /= math.fsum(w)
    prob = gd.MassProblem(gd.WeightedPoints(pts, w), 2.0, man.point(np.zeros(3)))
    result = gd.center_of_mass(prob, rule=gd.ArmijoRule(beta=0.5))
    mean = sum(wi * p.coords for wi, p in zip(w, pts))
    assert np.linalg.norm(result.center.coords - mean) <= 1e-10
    assert result.converged


def test_center_sphere_two_points_is_geodesic_midpoint():
    man = gd.Sphere(2)
    y1 = man.point([1.0, 0.0, 0.0])
    y2 = man.exp(y1, man.tangent(y1, [0.0, 0.8, 0.6]))
    mid = man.exp(y1, man.log(y1, y2).scaled(0.5))
    prob = gd.MassProblem(
        gd.WeightedPoints.equal_weights((y1, y2)), 2.0, mid, radius=1.4
    )
    result = gd.center_of_mass(prob, x0=y1, stop=gd.StopCriteria(grad_tol=1e-12))
    assert man.dist(result.center, mid) <= 1e-8


def test_center_euclidean_median_matches_weiszfeld():
    man = gd.Euclidean(2)
    rng = np.random.default_rng(72)
    pts = tuple(man.point(rng.standard_normal(2)) for _ in range(7))
    data = gd.WeightedPoints.equal_weights(pts)
    prob = gd.MassProblem(data, 1.0, man.point([0.0, 0.0]))
    coords = np.array([p.coords for p in pts])
    x0 = man.point(coords.mean(axis=0))
    result = gd.center_of_mass(prob, x0=x0, stop=gd.StopCriteria(grad_tol=1e-11))
    oracle = weiszfeld_oracle(coords, data.weights, coords.mean(axis=0))
    assert np.linalg.norm(result.center.coords - oracle) <= 1e-6


def test_center_gradient_norm_certificate(manifold):
    prob = random_problem(manifold, n_points=4, p=2.0, seed=73)
    stop = gd.StopCriteria(grad_tol=1e-10)
    result = gd.center_of_mass(prob, stop=stop)
    assert result.certificates["grad_norm_final"] <= stop.grad_tol
    assert result.certificates["validation"].get("global_min_below_data").passed


def test_center_unique_across_restarts():
    man = gd.Hyperboloid(2)
    prob = random_problem(man, n_points=4, p=2.0, seed=74)
    rng = np.random.default_rng(75)
    centers = []
    for _ in range(5):
        x0 = man.random_point(gd.Ball(prob.anchor, 1.2), rng)
        res = gd.center_of_mass(prob, x0=x0, stop=gd.StopCriteria(grad_tol=1e-11))
        centers.append(res.center)
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            assert man.dist(centers[i], centers[j]) <= 1e-7


def test_center_is_weak_sharp_of_order_two():
    prob = random_problem(gd.Sphere(2), n_points=4, p=2.0, seed=76)
    result = gd.center_of_mass(prob, stop=gd.StopCriteria(grad_tol=1e-11))
    alpha = gd.estimate_sharpness(
        prob.as_objective(), result.center, order=2, radius=0.2, samples=200, seed=77
    )
    assert alpha > 0.0


def test_cost_convex_on_admissible_balls_of_hadamard_backends():
    for man in (gd.Hyperboloid(2), gd.SPD(3)):
        for p in (1.0, 2.0):
            prob = random_problem(man, n_points=3, p=p, seed=78)
            report = gd.convexity_probe(
                prob.as_objective(), gd.Ball(prob.anchor, 1.2), samples=150, seed=79
            )
            assert report.violations == 0


def test_value_and_gradient_permutation_equivariant(manifold):
    prob = random_problem(manifold, n_points=5, p=2.0, seed=80, weights="random")
    perm = [3, 0, 4, 2, 1]
    prob_perm = gd.MassProblem(
        prob.data.permuted(perm), prob.p, prob.anchor, prob.radius
    )
    rng = np.random.default_rng(81)
    for _ in range(10):
        x = prob.manifold.random_point(gd.Ball(prob.anchor, 0.4), rng)
        assert prob.value(x) == prob_perm.value(x)
        np.testing.assert_array_equal(
            prob.gradient(x).coords, prob_perm.gradient(x).coords
        )
    r1 = gd.center_of_mass(prob, stop=gd.StopCriteria(grad_tol=1e-10))
    r2 = gd.center_of_mass(prob_perm, stop=gd.StopCriteria(grad_tol=1e-10))
    np.testing.assert_array_equal(r1.center.coords, r2.center.coords)


def test_auto_constant_rule_matches_armijo_limit():
    prob = random_problem(gd.SPD(3), n_points=3, p=2.0, seed=82)
    rule = gd.auto_constant_rule(prob, prob.anchor, seed=83)
    res_c = gd.center_of_mass(prob, rule=rule, stop=gd.StopCriteria(grad_tol=1e-10))
    res_a = gd.center_of_mass(prob, stop=gd.StopCriteria(grad_tol=1e-10))
    assert prob.manifold.dist(res_c.center, res_a.center) <= 1e-8
    assert res_c.converged
