from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremal_lab import polytope as pt
from extremal_lab.convex import GaugeExtremizer, MaxAffine
from extremal_lab.functionals import (
    infimum_over_closure,
    mean_value,
    normalize_mean_zero,
    random_max_affine,
    ratio_report,
    run_campaign,
    sharp_constant,
    trial_seeds,
)

from conftest import interior_point


@pytest.mark.parametrize("n, c", [(1, Fraction(1, 2)), (2, Fraction(8, 27)), (3, Fraction(27, 128))])
def test_sharp_constant(n, c):
    assert sharp_constant(n, exact=True) == c
    assert sharp_constant(n) == float(c)


def test_sharp_constant_rejects_zero():
    with pytest.raises(ValueError):
        sharp_constant(0)


def test_infimum_examples(interval, square):
    val, x = infimum_over_closure(MaxAffine([[2.0]], [-1.0]), interval)
    assert val == pytest.approx(-1.0) and x == pytest.approx([0.0], abs=1e-12)
    val, x = infimum_over_closure(GaugeExtremizer(square, [0.3, 0.7]), square)
    assert val == -1.0
    np.testing.assert_array_equal(x, [0.3, 0.7])
    val, x = infimum_over_closure(MaxAffine([[1.0]], [-0.5]), interval)
    assert val == pytest.approx(-0.5) and x == pytest.approx([0.0], abs=1e-12)


def test_infimum_tie_break_is_lexicographic(square):
    _, x = infimum_over_closure(MaxAffine([[0.0, 1.0]], [0.0]), square)
    np.testing.assert_allclose(x, [0.0, 0.0], atol=1e-12)
    _, x = infimum_over_closure(MaxAffine([[0.0, -1.0]], [0.0]), square)
    np.testing.assert_allclose(x, [0.0, 1.0], atol=1e-12)


def test_normalize_examples(interval, square):
    f = normalize_mean_zero(MaxAffine([[1.0]], [0.0]), interval)
    assert f.intercepts[0] == pytest.approx(-0.5)
    psi = MaxAffine([[0.0], [10.0]], [0.0, -9.0])
    g = normalize_mean_zero(psi, interval)
    np.testing.assert_allclose(g(np.linspace(0, 1, 11)), psi(np.linspace(0, 1, 11)) - 0.05, atol=1e-14)
    ext = normalize_mean_zero(GaugeExtremizer(square, [0.5, 0.5]), square)
    assert abs(ext.constant) < 1e-7


def test_ratio_examples(interval, square):
    r = ratio_report(GaugeExtremizer(square, [0.2, 0.9]), square)
    assert r.ratio == pytest.approx(8 / 27, abs=1e-12) and r.verdict == "within_bounds"
    r = ratio_report(MaxAffine([[1.0]], [-0.5]), interval)
    assert (r.abs_mean, r.infimum, r.ratio) == pytest.approx((0.25, -0.5, 0.5))
    r = ratio_report(MaxAffine([[0.0], [2.0]], [-0.25, -1.25]), interval)
    assert (r.abs_mean, r.infimum, r.ratio) == pytest.approx((9 / 32, -0.25, 9 / 8))
    assert r.sharp_lower == 0.5 and r.upper == 2.0


def test_degenerate_function_is_flagged(square):
    r = ratio_report(MaxAffine([[0.0, 0.0]], [3.0]), square)
    assert r.degenerate and np.isnan(r.ratio) and r.verdict == "within_bounds"


def test_report_json_fields(square):
    d = ratio_report(GaugeExtremizer(square, [0.5, 0.5]), square).to_dict()
    assert set(d) >= {"infimum", "argmin", "mean_residual", "abs_mean", "ratio", "sharp_lower", "upper", "verdict"}


def test_a_constant_recovers_formula(square):
    r = ratio_report(GaugeExtremizer(square, [0.5, 0.5]), square)
    direct = r.ratio * (-r.infimum) * 1.0 / (2 * r.negative_volume)
    assert r.a_constant == pytest.approx(direct)
    assert r.a_scaled == pytest.approx(1 / 3)


def test_campaign_summary_is_deterministic():
    s1, _ = run_campaign(2, 10, seed=11)
    s2, _ = run_campaign(2, 10, seed=11, threads=3)
    assert s1 == s2
    assert set(s1) == {"trials", "violations", "min_ratio", "max_ratio", "c_n"}


def test_trial_seeds_are_independent():
    a = [g.integers(1 << 60) for g in trial_seeds(0, 5)]
    assert len(set(a)) == 5
    assert a == [g.integers(1 << 60) for g in trial_seeds(0, 5)]


seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 3)


@given(dims, seeds, st.floats(0.01, 100.0))
def test_scale_invariance(n, seed, r):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    f = random_max_affine(n, rng, P)
    a, b = ratio_report(f, P), ratio_report(f.scaled(r), P)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-9)
    np.testing.assert_allclose(b.argmin, a.argmin, atol=1e-7)


@given(dims, seeds)
def test_two_sided_bound_and_a_bound(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    r = ratio_report(random_max_affine(n, rng, P), P)
    assert sharp_constant(n) - 1e-7 <= r.ratio < 2.0
    assert r.a_scaled >= 1 / (n + 1) - 1e-9
    assert abs(r.mean_residual) < 1e-7


@settings(max_examples=20)
@given(dims, seeds)
def test_extremizers_attain_lower_endpoint(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    g = GaugeExtremizer(P, y)
    assert ratio_report(g, P).ratio == pytest.approx(sharp_constant(n), abs=1e-7)
    assert ratio_report(g.to_max_affine(), P).ratio == pytest.approx(sharp_constant(n), abs=1e-7)


@given(dims, seeds)
def test_lp_infimum_is_a_lower_bound(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    f = random_max_affine(n, rng, P)
    val, x = infimum_over_closure(f, P)
    assert pt.contains(P, x, 1e-8)
    X = np.vstack([pt.sample_uniform(P, 2000, rng), P.vertices])
    assert np.all(f(X if n > 1 else X[:, 0]) >= val - 1e-9)


def test_mean_value_of_extremizer_is_zero(square):
    assert mean_value(GaugeExtremizer(square, [0.1, 0.6]), square) == pytest.approx(0.0, abs=1e-14)
