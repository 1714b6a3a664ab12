import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from extremal_lab import polytope as pt
from extremal_lab.errors import ApexOutside, DegenerateScale, DimensionTooLarge, EmptyInterior, Unbounded

from conftest import interior_point


def test_square_hrep(square):
    assert square.dim == 2
    assert square.volume == pytest.approx(1.0, abs=1e-12)


def test_half_line_is_unbounded():
    with pytest.raises(Unbounded):
        pt.make_hrep([[-1.0]], [0.0])


def test_contradictory_constraints_are_empty():
    with pytest.raises(EmptyInterior):
        pt.make_hrep([[1.0], [-1.0]], [0.0, -1.0])


def test_flat_polytope_is_rejected():
    with pytest.raises(EmptyInterior):
        pt.make_hrep([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, 0, 1, 0])


@pytest.mark.parametrize(
    "P, count",
    [(pt.unit_cube(2), 4), (pt.standard_simplex(2), 3), (pt.unit_cube(3), 8)],
)
def test_vertex_counts(P, count):
    assert len(pt.enumerate_vertices(P)) == count


def test_square_vertices_sorted(square):
    np.testing.assert_array_equal(pt.enumerate_vertices(square), [[0, 0], [0, 1], [1, 0], [1, 1]])


def test_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        pt.enumerate_vertices(pt.box(np.zeros(pt.MAX_DIM + 1), np.ones(pt.MAX_DIM + 1)))


def test_contains(square):
    assert pt.contains(square, [0.5, 0.5])
    assert not pt.contains(square, [1.5, 0.5])
    assert pt.contains(square, [1.0, 0.5], 1e-9)


def test_gauge_examples(square):
    assert pt.gauge(square, [0, 0], [1, 1]) == pytest.approx(1.0)
    assert pt.gauge(square, [0.5, 0.5], [1, 0]) == pytest.approx(2.0)
    assert pt.gauge(square, [0.3, 0.2], [0, 0]) == 0.0


def test_gauge_escaping_direction_is_infinite(square):
    assert pt.gauge(square, [0, 0], [-1, 0.5]) == np.inf


def test_gauge_apex_outside(square):
    with pytest.raises(ApexOutside):
        pt.gauge(square, [2.0, 0.5], [1, 0])


def test_homothety_examples(interval, square):
    H = pt.homothety(interval, [0.0], 0.5)
    np.testing.assert_allclose(H.vertices.ravel(), [0.0, 0.5], atol=1e-15)
    H = pt.homothety(square, [0.5, 0.5], 2 / 3)
    assert H.volume == pytest.approx(4 / 9, abs=1e-12)
    np.testing.assert_allclose(H.vertices.min(axis=0), [1 / 6, 1 / 6])
    same = pt.homothety(square, [0.2, 0.9], 1.0)
    np.testing.assert_allclose(same.vertices, square.vertices, atol=1e-15)


def test_homothety_scale_zero_warns(square):
    with pytest.warns(DegenerateScale):
        pt.homothety(square, [0.5, 0.5], 0.0)


def test_triangulations(square, simplex2):
    assert sum(s.volume for s in pt.triangulate(square)) == pytest.approx(1.0)
    assert len(pt.triangulate(simplex2)) == 1
    cube = pt.unit_cube(3)
    assert sum(s.volume for s in pt.triangulate(cube)) == pytest.approx(1.0)


def test_volumes(square, simplex2):
    assert pt.volume(square) == pytest.approx(1.0)
    assert pt.volume(simplex2) == pytest.approx(0.5)


def test_json_round_trip(tmp_path):
    P = pt.random_polytope(3, np.random.default_rng(4))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(P.to_dict()))
    Q = pt.Polytope.load(path)
    assert Q.volume == pytest.approx(P.volume, rel=1e-12)


def test_malformed_payload():
    with pytest.raises(ValueError):
        pt.Polytope.from_dict({"dim": 2, "halfspaces": [{"normal": [1, 0]}]})


seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 3)


@given(dims, seeds, st.floats(0.01, 50.0))
def test_gauge_positive_homogeneity(n, seed, lam):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    d = rng.normal(size=n)
    assert pt.gauge(P, y, lam * d) == pytest.approx(lam * pt.gauge(P, y, d), rel=1e-12)


@given(dims, seeds)
def test_gauge_subadditivity(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    d1, d2 = rng.normal(size=(2, n))
    assert pt.gauge(P, y, d1 + d2) <= pt.gauge(P, y, d1) + pt.gauge(P, y, d2) + 1e-12


@given(dims, seeds)
def test_membership_gauge_duality(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    y = interior_point(P, rng)
    lo, hi = P.vertices.min(axis=0) - 0.5, P.vertices.max(axis=0) + 0.5
    X = rng.uniform(lo, hi, size=(200, n))
    g = np.array([pt.gauge(P, y, x - y) for x in X])
    inside = pt.contains(P, X, 0.0)
    band = np.abs(g - 1.0) > 1e-9
    np.testing.assert_array_equal(inside[band], (g < 1.0)[band])


@given(dims, seeds, st.sampled_from([0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5]))
def test_homothety_volume_law(n, seed, s):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    c = interior_point(P, rng)
    assert pt.homothety(P, c, s).volume == pytest.approx(s**n * P.volume, rel=1e-9)


@given(dims, seeds)
def test_equal_volume_nested_sets_coincide(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    c = interior_point(P, rng)
    A = pt.homothety(P, c, 1.0 - 1e-12)
    assert abs(A.volume - P.volume) < 1e-9 * P.volume
    X = pt.sample_uniform(P, 500, rng)
    assert np.all(pt.contains(A, X, 1e-9))


@given(dims, seeds)
def test_triangulation_partitions(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    simplices = pt.triangulate(P)
    assert sum(s.volume for s in simplices) == pytest.approx(P.volume, rel=1e-10)
    X = pt.sample_uniform(P, 300, rng)
    hits = np.zeros(len(X), dtype=int)
    for s in simplices:
        T = s.vertices[1:] - s.vertices[0]
        lam = np.linalg.solve(T.T, (X - s.vertices[0]).T).T
        bary = np.column_stack([1.0 - lam.sum(axis=1), lam])
        hits += np.all(bary > 1e-12, axis=1)
    assert np.all(hits == 1)


@given(dims, seeds)
def test_samples_lie_inside(n, seed):
    rng = np.random.default_rng(seed)
    P = pt.random_polytope(n, rng)
    assert np.all(pt.contains(P, pt.sample_uniform(P, 200, rng)))
    assert pt.contains(P, pt.sample_boundary(P, rng), 1e-9)
