"""Bounded open convex polytopes in H-representation.

A :class:`Polytope` stores unit-normalised half-spaces ``a_i . x < b_i``.
The vertex list of the closure is derived by brute-force enumeration over
``n``-subsets of the constraints, which is exact and fast at desk scale
(``n <= 4``).  Volumes come from a pulling triangulation built on the
vertex/facet incidences.

All set computations use closure semantics with a single tolerance, so
sublevel sets ``{f < a}`` and ``{f <= a}`` are treated as the same polytope;
they differ by a null set.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection
from scipy.spatial import QhullError

from .errors import (
    ApexOutside,
    DegenerateScale,
    DimensionTooLarge,
    EmptyInterior,
    Unbounded,
)

TOL = 1e-9
MAX_DIM = 4
BRUTE_FORCE_SUBSETS = 4_000  # above this, qhull is faster


@lru_cache(maxsize=256)
def _subsets(m, n):
    return np.array(list(combinations(range(m), n)), dtype=np.intp).reshape(-1, n)


def _clean_rows(A, b):
    """Normalise rows to unit length; return None if a zero row is infeasible."""
    norms = np.linalg.norm(A, axis=1)
    zero = norms <= 1e-14
    if np.any(b[zero] < 0):
        return None
    keep = ~zero
    return A[keep] / norms[keep, None], b[keep] / norms[keep]


def _sort_lex(points):
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def _dedupe(points, tol):
    points = _sort_lex(points)
    kept = []
    for p in points:
        if not kept or np.min(np.max(np.abs(np.asarray(kept) - p), axis=1)) > tol:
            kept.append(p)
    return np.asarray(kept, dtype=float).reshape(-1, points.shape[1])


def enumerate_hrep_vertices(A, b, tol=TOL):
    """Vertices of the bounded set ``{A x <= b}`` (rows assumed unit-norm).

    Returns an array of shape ``(k, n)`` sorted lexicographically.
    """
    m, n = A.shape
    if n > MAX_DIM:
        raise DimensionTooLarge(f"vertex enumeration supports dim <= {MAX_DIM}, got {n}")
    if m < n:
        return np.empty((0, n))
    if math.comb(m, n) > BRUTE_FORCE_SUBSETS:
        return _qhull_vertices(A, b, tol)
    idx = _subsets(m, n)
    M = A[idx]
    rhs = b[idx]
    ok = np.abs(np.linalg.det(M)) > 1e-12
    if not np.any(ok):
        return np.empty((0, n))
    X = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    scale = 1.0 + np.max(np.abs(b))
    feasible = np.all(X @ A.T <= b + tol * scale, axis=1)
    return _dedupe(X[feasible], tol * scale) + 0.0


def _qhull_vertices(A, b, tol):
    """Halfspace intersection about the Chebyshev centre, for many constraints."""
    n = A.shape[1]
    x0, r = _chebyshev(A, b)
    scale = 1.0 + np.max(np.abs(b))
    if x0 is None or r <= tol * scale:
        return np.empty((0, n))
    try:
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), x0)
    except QhullError:
        return np.empty((0, n))
    X = hs.intersections[np.all(np.isfinite(hs.intersections), axis=1)]
    feasible = np.all(X @ A.T <= b + tol * scale, axis=1)
    return _dedupe(X[feasible], tol * scale) + 0.0


def _affine_rank(points, tol):
    if len(points) <= 1:
        return 0
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=tol))


def triangulate_hrep(A, b, vertices, tol=TOL):
    """Pulling triangulation of ``{A x <= b}`` given its vertices.

    Returns an integer array of shape ``(k, n + 1)`` indexing ``vertices``.
    A lower-dimensional or empty set yields no simplices.
    """
    n = A.shape[1]
    empty = np.empty((0, n + 1), dtype=np.intp)
    if len(vertices) < n + 1:
        return empty
    scale = 1.0 + np.max(np.abs(b))
    rank_tol = 1e-9 * (1.0 + np.max(np.abs(vertices)))
    if _affine_rank(vertices, rank_tol) < n:
        return empty
    active = np.abs(vertices @ A.T - b) <= tol * scale
    memo = {}

    def pull(face, k):
        if face in memo:
            return memo[face]
        if k == 0:
            out = [(face[0],)]
        else:
            v0 = face[0]
            arr = np.asarray(face)
            seen = set()
            out = []
            for i in range(A.shape[0]):
                sub = tuple(arr[active[arr, i]])
                if len(sub) < k or len(sub) == len(face) or sub[0] == v0 or sub in seen:
                    continue
                seen.add(sub)
                if _affine_rank(vertices[list(sub)], rank_tol) != k - 1:
                    continue
                out.extend((v0,) + s for s in pull(sub, k - 1))
        memo[face] = out
        return out

    simplices = pull(tuple(range(len(vertices))), n)
    return np.asarray(simplices, dtype=np.intp).reshape(-1, n + 1)


def simplex_volumes(points):
    """Volumes of a stack of simplices, ``points`` of shape ``(k, n + 1, n)``."""
    n = points.shape[-1]
    edges = points[:, 1:, :] - points[:, :1, :]
    return np.abs(np.linalg.det(edges)) / math.factorial(n)


def hrep_moments(A, b, tol=TOL):
    """Volume and centroid of ``{A x <= b}``, assumed bounded.

    Unvalidated fast path used by the integration engine.  Returns
    ``(0.0, None)`` for empty or flat sets.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    cleaned = _clean_rows(A, b)
    if cleaned is None:
        return 0.0, None
    A, b = cleaned
    V = enumerate_hrep_vertices(A, b, tol)
    simp = triangulate_hrep(A, b, V, tol)
    if len(simp) == 0:
        return 0.0, None
    pts = V[simp]
    vols = simplex_volumes(pts)
    total = math.fsum(vols)
    if total <= 0.0:
        return 0.0, None
    centroid = (vols[:, None] * pts.mean(axis=1)).sum(axis=0) / total
    return total, centroid


def hrep_vertices(A, b, tol=TOL):
    """Vertices of ``{A x <= b}`` after row normalisation (empty array if infeasible)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    cleaned = _clean_rows(A, b)
    if cleaned is None:
        return np.empty((0, A.shape[1]))
    return enumerate_hrep_vertices(*cleaned, tol)


@dataclass(frozen=True)
class Simplex:
    """An ``n``-simplex given by its ``n + 1`` vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError(f"need n+1 vertices in R^n, got shape {v.shape}")
        object.__setattr__(self, "vertices", v)
        if self.volume <= 0.0:
            raise ValueError("simplex vertices are affinely dependent")

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def volume(self):
        return float(simplex_volumes(self.vertices[None])[0])

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)


@dataclass(frozen=True, eq=False)
class Polytope:
    """Bounded open convex polytope ``{x : A x < b}``.

    Build instances with :func:`make_hrep`; the constructor itself does not
    validate.  Rows of ``A`` have unit Euclidean norm.
    """

    A: np.ndarray
    b: np.ndarray
    interior_point: np.ndarray
    tol: float = TOL

    @property
    def dim(self):
        return self.A.shape[1]

    @property
    def n_halfspaces(self):
        return self.A.shape[0]

    @property
    def halfspaces(self):
        return [(self.A[i].copy(), float(self.b[i])) for i in range(self.n_halfspaces)]

    @cached_property
    def vertices(self):
        return enumerate_hrep_vertices(self.A, self.b, self.tol)

    @cached_property
    def _simplex_index(self):
        return triangulate_hrep(self.A, self.b, self.vertices, self.tol)

    @cached_property
    def simplex_points(self):
        """Triangulation as an array of shape ``(k, n + 1, n)``."""
        return self.vertices[self._simplex_index]

    @cached_property
    def simplex_volumes(self):
        if len(self._simplex_index) == 0:
            return np.empty(0)
        return simplex_volumes(self.simplex_points)

    @cached_property
    def volume(self):
        return math.fsum(self.simplex_volumes)

    @cached_property
    def active_matrix(self):
        """Boolean ``(n_vertices, n_halfspaces)`` vertex/hyperplane incidence."""
        scale = 1.0 + np.max(np.abs(self.b))
        return np.abs(self.vertices @ self.A.T - self.b) <= self.tol * scale

    @cached_property
    def facets(self):
        """Indices of irredundant, pairwise distinct facet half-spaces."""
        act = self.active_matrix
        rank_tol = 1e-9 * (1.0 + np.max(np.abs(self.vertices)))
        out = []
        for i in range(self.n_halfspaces):
            pts = self.vertices[act[:, i]]
            if len(pts) < self.dim or _affine_rank(pts, rank_tol) != self.dim - 1:
                continue
            if any(
                np.allclose(self.A[i], self.A[j], atol=1e-9)
                and abs(self.b[i] - self.b[j]) <= 1e-9 * (1 + abs(self.b[i]))
                for j in out
            ):
                continue
            out.append(i)
        return tuple(out)

    def to_dict(self):
        return {
            "dim": self.dim,
            "halfspaces": [
                {"normal": [float(v) for v in a], "offset": float(c)} for a, c in self.halfspaces
            ],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            dim = int(data["dim"])
            hs = data["halfspaces"]
            normals = [h["normal"] for h in hs]
            offsets = [h["offset"] for h in hs]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polytope payload: {exc!r}") from exc
        return make_hrep(normals, offsets, dim)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, halfspaces={self.n_halfspaces})"


def _chebyshev(A, b):
    m, n = A.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    bounds = [(None, None)] * n + [(0.0, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        return None, 0.0
    return res.x[:n], float(res.x[-1])


def _is_bounded(A, b):
    n = A.shape[1]
    for j in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                return False
    return True


def make_hrep(normals, offsets, dim=None, tol=TOL):
    """Validated polytope ``{x : normals[i] . x < offsets[i]}``.

    Raises :class:`EmptyInterior` when no strictly feasible point exists and
    :class:`Unbounded` when the set has a recession direction.
    """
    b = np.asarray(offsets, dtype=float).reshape(-1)
    if dim is None:
        dim = int(np.asarray(normals[0]).size)
    A = np.asarray(normals, dtype=float).reshape(len(b), -1) if len(b) else np.empty((0, dim))
    if A.shape[1] != dim:
        raise ValueError(f"normals have length {A.shape[1]}, expected dim {dim}")
    if dim < 1:
        raise ValueError("dim must be positive")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite half-space data")
    cleaned = _clean_rows(A, b)
    if cleaned is None:
        raise EmptyInterior("a zero normal with negative offset is infeasible")
    A, b = cleaned
    if len(b) == 0:
        raise Unbounded("no half-spaces given")
    center, radius = _chebyshev(A, b)
    if center is None or radius <= tol:
        raise EmptyInterior("no strictly feasible point")
    if len(b) < dim + 1 or not _is_bounded(A, b):
        raise Unbounded("the half-spaces admit a recession direction")
    A.setflags(write=False)
    b.setflags(write=False)
    return Polytope(A, b, center, tol)


def box(lower, upper):
    """Axis-aligned box ``prod_j (lower_j, upper_j)``."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    n = len(lower)
    eye = np.eye(n)
    return make_hrep(np.vstack([-eye, eye]), np.concatenate([-lower, upper]), n)


def standard_simplex(n):
    """``{x_i > 0, sum x_i < 1}``."""
    normals = np.vstack([-np.eye(n), np.ones((1, n))])
    return make_hrep(normals, np.concatenate([np.zeros(n), [1.0]]), n)


def unit_cube(n):
    return box(np.zeros(n), np.ones(n))


def contains(P, x, tol=TOL):
    """Closure membership ``a_i . x < b_i + tol`` for one point or a stack."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != P.dim:
        if P.dim == 1 and x.ndim <= 1:
            x = x.reshape(-1, 1)
        else:
            raise ValueError(f"point dimension {x.shape[-1]} != polytope dim {P.dim}")
    inside = np.all(x @ P.A.T < P.b + tol, axis=-1)
    return bool(inside) if inside.ndim == 0 else inside


def _check_apex(P, y):
    y = np.asarray(y, dtype=float).reshape(P.dim)
    slack = P.b - P.A @ y
    if np.any(slack < -P.tol * (1.0 + np.max(np.abs(P.b)))):
        raise ApexOutside(f"apex {y.tolist()} lies outside the closure of P")
    return y, np.maximum(slack, 0.0)


def gauge(P, y, d):
    """Minkowski functional of ``P - y`` evaluated at direction(s) ``d``.

    ``inf{lam > 0 : d / lam in P - y}``.  Returns ``+inf`` for directions
    that leave the closure immediately through a facet containing ``y``.
    """
    y, slack = _check_apex(P, y)
    d = np.asarray(d, dtype=float)
    single = d.ndim == 1 or (P.dim == 1 and d.ndim == 0)
    d = d.reshape(-1, P.dim)
    ad = d @ P.A.T
    scale = P.tol * (1.0 + np.max(np.abs(P.b)))
    on_facet = slack <= scale
    dn = np.linalg.norm(d, axis=1, keepdims=True)
    escaping = np.any(on_facet & (ad > scale * (1.0 + dn)), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(~on_facet & (ad > 0), ad / np.where(on_facet, 1.0, slack), 0.0)
    g = q.max(axis=1)
    g[escaping] = np.inf
    return float(g[0]) if single else g


def homothety(P, center, scale):
    """``center + scale * (P - center)`` in H-representation."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    c = np.asarray(center, dtype=float).reshape(P.dim)
    if scale == 0:
        warnings.warn("homothety with scale 0 collapses P to a point", DegenerateScale, stacklevel=2)
    b = scale * P.b + (1.0 - scale) * (P.A @ c)
    b.setflags(write=False)
    out = Polytope(P.A, b, c + scale * (P.interior_point - c), P.tol)
    if "vertices" in P.__dict__ or scale > 0:
        V = c[None, :] if scale == 0 else c + scale * (P.vertices - c)
        out.__dict__["vertices"] = V
    return out


def enumerate_vertices(P):
    return P.vertices


def triangulate(P):
    """Simplices with disjoint interiors covering the closure of ``P``."""
    return [Simplex(s) for s in P.simplex_points]


def volume(P):
    return P.volume


def intersect(P, normals, offsets):
    """Moments ``(volume, centroid)`` of ``closure(P) ∩ {normals . x <= offsets}``."""
    normals = np.asarray(normals, dtype=float).reshape(-1, P.dim)
    offsets = np.asarray(offsets, dtype=float).reshape(-1)
    return hrep_moments(np.vstack([P.A, normals]), np.concatenate([P.b, offsets]), P.tol)


def sample_uniform(P, count, rng):
    """``count`` uniform samples from ``P`` via volume-weighted simplex picks."""
    pts = P.simplex_points
    w = P.simplex_volumes / P.volume
    which = rng.choice(len(pts), size=count, p=w)
    bary = rng.dirichlet(np.ones(P.dim + 1), size=count)
    return np.einsum("kj,kjn->kn", bary, pts[which])


def sample_boundary(P, rng):
    """A random point on the boundary: a vertex or a point of a facet."""
    if rng.random() < 0.3:
        return P.vertices[rng.integers(len(P.vertices))].copy()
    i = P.facets[rng.integers(len(P.facets))]
    pts = P.vertices[P.active_matrix[:, i]]
    w = rng.dirichlet(np.ones(len(pts)))
    return w @ pts


def random_polytope(n, rng, max_tries=100):
    """Random bounded polytope around the unit ball, translated randomly."""
    shift = rng.uniform(-1.0, 1.0, size=n)
    if n == 1:
        lo, width = rng.uniform(-1.0, 1.0), rng.uniform(0.2, 2.0)
        return box([lo], [lo + width])
    for _ in range(max_tries):
        m = int(rng.integers(2 * n + 2, 3 * n + 5))
        normals = rng.normal(size=(m, n))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = rng.uniform(0.5, 1.5, size=m) + normals @ shift
        try:
            P = make_hrep(normals, offsets, n)
        except Unbounded:
            continue
        if np.max(np.linalg.norm(P.vertices - shift, axis=1)) <= 4.0:
            return P
    raise RuntimeError("failed to draw a bounded random polytope")
