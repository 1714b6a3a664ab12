"""Integration of convex functions over polytopes.

Four engines, each usable as a cross-check on the others:

* ``integrate_bracketed`` -- adaptive simplex bisection with the rigorous
  convexity bracket ``vol(S) f(centroid) <= int_S f <= vol(S) mean f(vertices)``;
* ``layer_cake_abs`` / ``layer_cake_integral`` -- 1-D quadrature of the
  sublevel volume profile ``a -> vol{f < a}``;
* ``monte_carlo_integral`` -- volume-weighted simplex sampling;
* ``piecewise_parts`` -- exact region split for max-affine integrands.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import polytope as pt
from .convex import GaugeExtremizer, Grid, MaxAffine, Shifted, as_max_affine
from .errors import BudgetExceeded, UnsupportedVariant

METHODS = ("bracket", "layer_cake", "monte_carlo", "exact")


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    lower: float
    upper: float
    method: str
    work: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def width(self):
        return self.upper - self.lower

    def to_dict(self):
        return asdict(self)


def _points_eval(f, X):
    return np.atleast_1d(np.asarray(f(X[:, 0] if X.shape[1] == 1 else X), dtype=float))


# ----------------------------------------------------------------------------
# exact region split for max-affine integrands


@dataclass(frozen=True)
class PiecewiseParts:
    """Exact pieces of ``int_P f`` for piecewise-linear ``f``.

    ``negative`` is ``int_{f<0} f`` (nonpositive) and ``negative_volume``
    is ``vol{f < 0}``.
    """

    positive: float
    negative: float
    negative_volume: float
    volume: float

    @property
    def integral(self):
        return self.positive + self.negative

    @property
    def absolute(self):
        return self.positive - self.negative


def _region_rows(ma, i):
    others = np.arange(len(ma.intercepts)) != i
    return ma.slopes[others] - ma.slopes[i], ma.intercepts[i] - ma.intercepts[others]


def piecewise_parts(f, P, split=True):
    """Integrate a max-affine ``f`` exactly on each linearity region of ``P``.

    With ``split=False`` only the signed integral is formed, which halves
    the number of polytopes visited.
    """
    ma = as_max_affine(f)
    pos, neg, neg_vol = [], [], []
    for i in range(len(ma.intercepts)):
        s, c = ma.slopes[i], ma.intercepts[i]
        rows, offs = _region_rows(ma, i)
        A = np.vstack([P.A, rows])
        b = np.concatenate([P.b, offs])
        if not split:
            vol, cen = pt.hrep_moments(A, b, P.tol)
            if vol > 0:
                pos.append(vol * (s @ cen + c))
            continue
        vol, cen = pt.hrep_moments(np.vstack([A, s]), np.append(b, -c), P.tol)
        if vol > 0:
            neg.append(vol * (s @ cen + c))
            neg_vol.append(vol)
        vol, cen = pt.hrep_moments(np.vstack([A, -s]), np.append(b, c), P.tol)
        if vol > 0:
            pos.append(vol * (s @ cen + c))
    # region pieces may carry roundoff of the wrong sign near {f = 0}
    return PiecewiseParts(
        math.fsum(pos) if not split else max(math.fsum(pos), 0.0),
        min(math.fsum(neg), 0.0),
        math.fsum(neg_vol),
        P.volume,
    )


def integrate_exact(f, P, absolute=False):
    parts = piecewise_parts(f, P, split=absolute)
    v = parts.absolute if absolute else parts.integral
    return IntegralEstimate(v, v, v, "exact", len(as_max_affine(f).intercepts))


# ----------------------------------------------------------------------------
# adaptive bracket


def integrate_bracketed(f, P, tol=1e-4, max_simplices=200_000, batch=128):
    """Rigorous bracket for ``int_P f`` with ``f`` convex and finite on the closure.

    Stops when ``upper - lower < tol * (1 + |value|)``.  Raises
    :class:`BudgetExceeded` (carrying the current bracket) once the
    triangulation holds ``max_simplices`` pieces.
    """
    n = P.dim
    pts = P.simplex_points
    k = len(pts)
    vals = _points_eval(f, pts.reshape(-1, n)).reshape(k, n + 1)
    cen = _points_eval(f, pts.mean(axis=1))
    vols = P.simplex_volumes
    heap = []
    counter = 0
    for j in range(k):
        lo, hi = vols[j] * cen[j], vols[j] * vals[j].mean()
        heap.append((-(hi - lo), tuple(pts[j].mean(axis=0)), counter, pts[j], vals[j], vols[j], lo, hi))
        counter += 1
    heapq.heapify(heap)
    lower = math.fsum(h[6] for h in heap)
    upper = math.fsum(h[7] for h in heap)

    def estimate():
        lo = math.fsum(h[6] for h in heap)
        hi = math.fsum(h[7] for h in heap)
        return IntegralEstimate(0.5 * (lo + hi), lo, hi, "bracket", len(heap))

    while upper - lower >= tol * (1.0 + abs(0.5 * (lower + upper))):
        if len(heap) >= max_simplices:
            raise BudgetExceeded("subdivision cap reached", estimate())
        take = [heapq.heappop(heap) for _ in range(min(batch, len(heap)))]
        mids, kids = [], []
        for item in take:
            S, sv = item[3], item[4]
            lower -= item[6]
            upper -= item[7]
            d = np.linalg.norm(S[:, None, :] - S[None, :, :], axis=-1)
            i, j = np.unravel_index(np.argmax(np.triu(d, 1)), d.shape)
            m = 0.5 * (S[i] + S[j])
            mids.append(m)
            for drop in (j, i):
                child = S.copy()
                child[drop] = m
                kids.append((child, sv.copy(), drop, item[5] / 2))
        fm = _points_eval(f, np.asarray(mids))
        for idx, (child, cv, drop, vol) in enumerate(kids):
            cv[drop] = fm[idx // 2]
            kids[idx] = (child, cv, vol)
        fc = _points_eval(f, np.asarray([c[0].mean(axis=0) for c in kids]))
        for (child, cv, vol), fcen in zip(kids, fc):
            lo, hi = vol * fcen, vol * cv.mean()
            lower += lo
            upper += hi
            heapq.heappush(heap, (-(hi - lo), tuple(child.mean(axis=0)), counter, child, cv, vol, lo, hi))
            counter += 1
    return estimate()


# ----------------------------------------------------------------------------
# sublevel volumes and layer cake


def _gauge_profile_antiderivative(n, shift):
    """Antiderivative of ``t -> vol{phi < t}/vol(P)`` for a shifted extremizer."""
    lo, hi = shift - 1.0, shift + 1.0 / n
    c = (n / (n + 1.0)) ** n / (n + 1.0)

    def G(t):
        if t <= lo:
            return 0.0
        if t <= hi:
            return c * (t - lo) ** (n + 1)
        return c * (hi - lo) ** (n + 1) + (t - hi)

    return G, lo, hi


def _split_shift(f):
    shift = 0.0
    while isinstance(f, Shifted):
        shift += f.constant
        f = f.base
    return f, shift


def sublevel_volume(f, P, a):
    """``vol{x in P : f(x) < a}``."""
    base, shift = _split_shift(f)
    if isinstance(base, GaugeExtremizer):
        n = P.dim
        t = min(max(n * (a - shift + 1.0) / (n + 1.0), 0.0), 1.0)
        return t**n * P.volume
    if isinstance(base, Grid):
        raise UnsupportedVariant("grid sublevel sets are not polytopes")
    ma = as_max_affine(f)
    return pt.intersect(P, ma.slopes, a - ma.intercepts)[0]


def _breakpoints(ma, P):
    vals = [P.vertices @ ma.slopes.T + ma.intercepts]
    for i in range(len(ma.intercepts)):
        rows, offs = _region_rows(ma, i)
        V = pt.hrep_vertices(np.vstack([P.A, rows]), np.concatenate([P.b, offs]), P.tol)
        if len(V):
            vals.append(V @ ma.slopes.T + ma.intercepts)
    f_at = np.concatenate([np.max(v, axis=1) for v in vals])
    return np.unique(np.round(f_at, 12))


def _gl_integral(g, a, b, nodes, weights):
    x = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    return 0.5 * (b - a) * math.fsum(w * g(t) for w, t in zip(weights, x))


def _composite(g, edges, q, rtol=1e-11, max_depth=12):
    """Composite Gauss-Legendre with adaptive halving; returns (value, error, evals)."""
    nodes, weights = np.polynomial.legendre.leggauss(q)
    total, err, evals = [], [], 0
    stack = [(float(a), float(b), 0) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    while stack:
        a, b, depth = stack.pop()
        whole = _gl_integral(g, a, b, nodes, weights)
        m = 0.5 * (a + b)
        halves = _gl_integral(g, a, m, nodes, weights) + _gl_integral(g, m, b, nodes, weights)
        evals += 3 * q
        diff = abs(halves - whole)
        if diff <= rtol * (1.0 + abs(halves)) or depth >= max_depth:
            total.append(halves)
            err.append(diff)
        else:
            stack += [(a, m, depth + 1), (m, b, depth + 1)]
    return math.fsum(total), math.fsum(err), evals


def _layer_parts(f, P, quadrature_nodes=None):
    """``(int_{f<0} |f|, int_{f>=0} f, error, work)`` via the volume profile."""
    base, shift = _split_shift(f)
    vol = P.volume
    if isinstance(base, GaugeExtremizer):
        G, lo, hi = _gauge_profile_antiderivative(P.dim, shift)
        neg = G(0.0)
        top = max(hi, 0.0)
        pos = top - (G(top) - G(0.0))
        return neg * vol, pos * vol, 0.0, 0
    if isinstance(base, Grid):
        raise UnsupportedVariant("layer cake needs polytope sublevel sets")
    ma = as_max_affine(f)
    q = quadrature_nodes or P.dim + 1
    bp = _breakpoints(ma, P)
    fmin, fmax = float(bp[0]), float(bp[-1])
    profile = lambda t: pt.intersect(P, ma.slopes, t - ma.intercepts)[0]
    neg_edges = np.unique(np.concatenate([bp[bp < 0], [min(0.0, fmin), min(0.0, fmax)]]))
    pos_edges = np.unique(np.concatenate([bp[bp > 0], [max(0.0, fmin), max(0.0, fmax)]]))
    neg, e1, w1 = _composite(profile, neg_edges, q)
    # vol{f >= t} for t >= 0; below fmin the profile is empty so vol - V = vol
    pos, e2, w2 = _composite(lambda t: vol - profile(t), pos_edges, q)
    if fmin > 0:
        pos += fmin * vol
    if fmax < 0:
        neg += -fmax * vol
    return neg, pos, e1 + e2, w1 + w2


def layer_cake_abs(f, P, quadrature_nodes=None):
    """``int_P |f|`` from ``int_0^inf vol{f < -t} dt + int_0^inf vol{f >= t} dt``.

    Exact for extremizers (closed-form power-law profile).  For max-affine
    integrands the profile is a piecewise polynomial of degree ``n`` whose
    breakpoints are the values of ``f`` at the region vertices, so
    Gauss-Legendre with ``n + 1`` nodes per piece is exact up to roundoff.
    """
    neg, pos, err, work = _layer_parts(f, P, quadrature_nodes)
    v = neg + pos
    slack = err + 1e-12 * (1.0 + abs(v))
    return IntegralEstimate(v, v - slack, v + slack, "layer_cake", work)


def layer_cake_integral(f, P, quadrature_nodes=None):
    """Signed ``int_P f`` from the same volume profile."""
    neg, pos, err, work = _layer_parts(f, P, quadrature_nodes)
    v = pos - neg
    slack = err + 1e-12 * (1.0 + abs(neg) + abs(pos))
    return IntegralEstimate(v, v - slack, v + slack, "layer_cake", work)


# ----------------------------------------------------------------------------
# Monte Carlo


def monte_carlo_integral(f, P, sample_count=100_000, seed=0, absolute=False):
    """Unbiased estimate of ``int_P f`` (or ``int_P |f|``) with a 3-sigma bracket."""
    rng = np.random.default_rng(seed)
    X = pt.sample_uniform(P, sample_count, rng)
    vals = _points_eval(f, X)
    if absolute:
        vals = np.abs(vals)
    vol = P.volume
    mean = vals.mean()
    if np.all(vals == vals[0]):
        mean, se = float(vals[0]), 0.0
    else:
        se = vol * vals.std(ddof=1) / math.sqrt(sample_count)
    value = vol * mean
    return IntegralEstimate(float(value), float(value - 3 * se), float(value + 3 * se), "monte_carlo", sample_count)


def integrate(f, P):
    """Best available signed integral: exact for piecewise-linear, bracket otherwise."""
    base, _ = _split_shift(f)
    if isinstance(base, (MaxAffine, GaugeExtremizer)):
        if isinstance(base, GaugeExtremizer):
            return layer_cake_integral(f, P)
        return integrate_exact(f, P)
    return integrate_bracketed(f, P)
