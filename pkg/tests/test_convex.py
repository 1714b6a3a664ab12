import numpy as np
import pytest
from hypothesis import given, strategies as st

from extremal_lab import polytope as pt
from extremal_lab.convex import (
    GaugeExtremizer,
    Grid,
    MaxAffine,
    Shifted,
    as_max_affine,
    check_convexity,
    evaluate,
    from_dict,
    involution_residual,
    legendre_transform,
    to_dict,
)
from extremal_lab.errors import OutsideDomain, UnsupportedVariant

from conftest import inf_definition, interior_point


def test_interval_extremizer_is_2x_minus_1(interval):
    f = GaugeExtremizer(interval, [0.0])
    assert evaluate(f, 0.75) == pytest.approx(0.5)
    np.testing.assert_allclose(f(np.linspace(0, 1, 11)), 2 * np.linspace(0, 1, 11) - 1, atol=1e-15)


def test_square_extremizer_corner(square):
    assert GaugeExtremizer(square, [0.5, 0.5])([1.0, 1.0]) == pytest.approx(0.5)


def test_single_piece():
    assert MaxAffine([[1.0]], [-0.5])(0.5) == 0.0


def test_outside_domain(square):
    with pytest.raises(OutsideDomain):
        GaugeExtremizer(square, [0.5, 0.5])([1.5, 0.5])


def test_shapes():
    f = MaxAffine([[1.0, 2.0], [0.0, -1.0]], [0.0, 1.0])
    assert isinstance(f([1.0, 1.0]), float)
    assert f(np.ones((5, 2))).shape == (5,)


def test_max_affine_algebra():
    f = MaxAffine([[1.0], [-1.0]], [0.0, 0.0])
    g = MaxAffine([[2.0]], [1.0])
    x = np.linspace(-2, 2, 41)
    np.testing.assert_allclose((f + g)(x), f(x) + g(x))
    np.testing.assert_allclose(f.scaled(3.0)(x), 3 * f(x))
    np.testing.assert_allclose(f.shifted(-1)(x), f(x) - 1)
    dup = MaxAffine([[1.0], [1.0], [0.0]], [0.0, -1.0, -5.0])
    simple = dup.simplified()
    assert len(simple.intercepts) == 2
    np.testing.assert_allclose(simple(x), dup(x))


def test_as_max_affine_of_grid_fails():
    g = Grid((np.linspace(0, 1, 5),), np.zeros(5))
    with pytest.raises(UnsupportedVariant):
        as_max_affine(g)


def test_serialisation_round_trip(square):
    for f in (MaxAffine([[1.0, 0.5]], [0.2]), GaugeExtremizer(square, [0.3, 0.7]), Shifted(GaugeExtremizer(square, [0.5, 0.5]), 0.1)):
        g = from_dict(to_dict(f))
        X = pt.sample_uniform(square, 50, np.random.default_rng(0))
        np.testing.assert_allclose(g(X), f(X), atol=1e-15)


def test_legendre_quadratic():
    g = legendre_transform(lambda x: 0.5 * x**2, [(-3, 3)], 201)
    s = np.linspace(-2.5, 2.5, 51)
    h = 6 / 200
    assert np.max(np.abs(g(s) - 0.5 * s**2)) < h


def test_legendre_abs_is_indicator():
    g = legendre_transform(np.abs, [(-3, 3)], 201, slope_box=[(-2, 2)])
    s = np.linspace(-1, 1, 21)
    np.testing.assert_allclose(g(s), 0.0, atol=1e-12)
    nodes = g.axes[0]
    assert np.all(g.saturated[np.abs(nodes) > 1 + 1e-9])
    assert not np.any(g.saturated[np.abs(nodes) < 1 - 1e-9])


def test_legendre_softplus_entropy():
    g = legendre_transform(lambda x: np.logaddexp(0.0, x), [(-30, 30)], 2001)
    assert g(0.5) == pytest.approx(-np.log(2), abs=1e-3)


def test_legendre_2d_separable():
    g = legendre_transform(lambda x: 0.5 * (x**2).sum(axis=1), [(-2, 2), (-2, 2)], 81)
    s = np.array([[0.3, -0.4], [1.0, 0.5]])
    np.testing.assert_allclose(g(s), 0.5 * (s**2).sum(axis=1), atol=0.01)


def test_convexity_checks(square):
    assert check_convexity(GaugeExtremizer(square, [0.5, 0.5]), square)
    axes = (np.linspace(-1, 1, 41),)
    bad = check_convexity(Grid(axes, -axes[0] ** 2))
    assert not bad and bad.witness is not None
    rng = np.random.default_rng(1)
    assert check_convexity(MaxAffine(rng.normal(size=(6, 2)), rng.normal(size=6)), square)


def test_involution_examples():
    box = [(-3, 3)]
    r = involution_residual(lambda x: 0.5 * x**2, box, 257)
    assert r < 5 * 6 / 256
    assert involution_residual(lambda x: 3 * x - 2, box, 64) < 1e-12
    res = [involution_residual(lambda x: np.maximum(0, 2 * x - 1), [(0, 1)], m) for m in (64, 128, 256, 512)]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_closed_form_matches_inf_definition():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for k in range(1000):
        n = 1 + k % 3
        if k % 50 == 0:
            polys = {d: pt.random_polytope(d, rng) for d in (1, 2, 3)}
        Pn = polys[n]
        y = interior_point(Pn, rng) if k % 7 else Pn.vertices[rng.integers(len(Pn.vertices))]
        x = pt.sample_uniform(Pn, 1, rng)[0]
        phi = GaugeExtremizer(Pn, y)
        worst = max(worst, abs(phi(x) - inf_definition(Pn, y, x, iters=40)))
    assert worst < 1e-8


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_extremizer_range(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    phi = GaugeExtremizer(P, y)
    assert phi(y) == pytest.approx(-1.0)
    vals = phi(pt.sample_uniform(P, 200, rng))
    assert np.all(vals >= -1 - 1e-12) and np.all(vals <= 1 / n + 1e-12)
    assert np.max(phi(P.vertices if n > 1 else P.vertices[:, 0])) == pytest.approx(1 / n)


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_max_affine_form_agrees(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    phi = GaugeExtremizer(P, y)
    X = pt.sample_uniform(P, 200, rng)
    arg = X if n > 1 else X[:, 0]
    np.testing.assert_allclose(phi.to_max_affine()(arg), phi(arg), atol=1e-12)


quad_coef = st.floats(0.2, 3.0)


@given(quad_coef, quad_coef)
def test_order_reversal(a, b):
    lo, hi = min(a, b), max(a, b)
    box = [(-2, 2)]
    slopes = [(-1.0, 1.0)]
    f = legendre_transform(lambda x: 0.5 * lo * x**2, box, 101, slope_box=slopes)
    g = legendre_transform(lambda x: 0.5 * hi * x**2, box, 101, slope_box=slopes)
    assert np.all(f.values >= g.values - 1e-12)


@given(st.integers(0, 2**32 - 1))
def test_fenchel_young_and_double_conjugate(seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(0.5, 2.0)
    psi = lambda x: np.logaddexp(0.0, c * x)
    box = [(-6, 6)]
    g = legendre_transform(psi, box, 301)
    x = rng.choice(np.linspace(-6, 6, 301), 200)
    s = rng.uniform(g.lower[0], g.upper[0], 200)
    assert np.all(psi(x) + g(s) >= s * x - 1e-9)
    gg = legendre_transform(g, [(g.lower[0], g.upper[0])], 301, slope_box=[(-6, 6)])
    xs = gg.axes[0]
    assert np.all(gg.values <= psi(xs) + 1e-9)
