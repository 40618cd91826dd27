import json
import math

import numpy as np

import geodescent as gd
from geodescent.verify import CheckResult, SuiteReport, run_inequality_suite


def test_suite_reports_zero_violations():
    report = run_inequality_suite(samples=800, seed=0)
    assert report.passed
    for check in report.checks:
        assert check.violations == 0
        assert check.worst_margin <= 1e-9


def test_suite_passes_under_different_seeds():
    # the bounds are theorems: any seed must report zero violations
    for seed in (1, 20260811):
        report = run_inequality_suite(samples=400, seed=seed)
        assert report.passed, [c.name for c in report.checks if not c.passed]


def test_suite_covers_both_dimensions_and_all_checks():
    report = run_inequality_suite(samples=50, seed=3, dims=(2, 5))
    names = [c.name for c in report.checks]
    for dim in (2, 5):
        assert f"squared_distance_descent_bound_H{dim}" in names
        assert f"cosh_distance_growth_bound_H{dim}" in names
        assert f"chord_gradient_step_bound_H{dim}" in names
        assert f"quasi_fejer_along_run_H{dim}" in names
    assert "ratio_sequence_boundedness" in names


def test_zero_step_gives_zero_margins():
    # at t = 0 the step point is x itself and every bound collapses to equality
    man = gd.Hyperboloid(2)
    base = man.base_point()
    rng = np.random.default_rng(5)
    anchors = [man.random_point(gd.Ball(base, 1.0), rng) for _ in range(3)]
    prob = gd.MassProblem(gd.WeightedPoints.equal_weights(anchors), 2.0, base)
    x = man.random_point(gd.Ball(base, 1.0), rng)
    z = man.random_point(gd.Ball(base, 1.0), rng)
    if prob.value(z) > prob.value(x):
        x, z = z, x
    g = prob.gradient(x)
    gn = man.norm(x, g)
    gamma0 = man.exp(x, g.scaled(0.0))
    d_xz, d_gz = man.dist(x, z), man.dist(gamma0, z)
    hb = gd.tanh_ratio(d_xz)
    fx, fz = prob.value(x), prob.value(z)

    margin_a = d_gz**2 - (
        d_xz**2 + (2.0 * math.sinh(0.0) / (gn * hb)) * (0.0 - hb * (fx - fz))
    )
    margin_b = math.cosh(d_gz) - math.cosh(d_xz) * (1.0 + 0.0)
    margin_c = d_gz**2 - (d_xz**2 + 0.0)
    assert margin_a == 0.0
    assert margin_b == 0.0
    assert margin_c == 0.0


def test_report_serializes_and_flags_failures():
    good = CheckResult("demo", 10, 0, -1e-3, {"dim": 2})
    bad = CheckResult("broken", 10, 2, 5e-8, {})
    report = SuiteReport(checks=(good, bad), seed=0, samples=10)
    assert not report.passed
    blob = json.loads(json.dumps(report.to_dict()))
    assert blob["passed"] is False
    assert blob["checks"][0]["name"] == "demo"
    assert set(blob["checks"][1]) == {
        "name", "samples", "violations", "worst_margin", "params"
    }
