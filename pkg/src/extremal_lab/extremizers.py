"""Gauge extremizers: construction, certification, inversion and affine cases.

The extremizer with apex ``y`` is ``phi_y = (1 + 1/n) * gauge_{P-y}(x - y) - 1``.
Its sublevel sets are homothetic copies of ``P``:

    {phi_y < a} = y + n(a+1)/(n+1) * (P - y),   -1 < a <= 1/n,

and conversely a convex function whose sublevel sets all have this form is
an extremizer.  ``certify_extremizer`` tests that identity level by level.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import polytope as pt
from .convex import AffinePiece, ConvexFn, GaugeExtremizer, MaxAffine, as_max_affine
from .errors import NoNegativePart
from .functionals import (
    infimum_over_closure,
    mean_value,
    normalize_mean_zero,
    ratio_report,
    sharp_constant,
    supremum_over_closure,
)
from .integration import _points_eval, _split_shift, monte_carlo_integral

MC_SAMPLES = 100_000


def build_gauge_extremizer(P, y):
    """The extremizer of ``P`` whose infimum ``-1`` is attained at ``y``."""
    return GaugeExtremizer(P, y)


def recover_apex(f, P):
    """The minimiser of ``f`` over ``closure(P)``; inverts :func:`build_gauge_extremizer`."""
    return infimum_over_closure(f, P)[1]


@dataclass(frozen=True)
class ExtremizerCertificate:
    """Level-wise comparison of ``{f < a}`` with the predicted homothety.

    Residuals are symmetric-difference volumes as fractions of ``vol P``.
    ``method`` is ``"exact"`` when both sets are polytopes and
    ``"monte_carlo"`` otherwise, in which case ``residual_errors`` holds
    the 3-sigma half widths.
    """

    apex: np.ndarray
    homothety_residuals: list
    range_check: tuple
    mean_residual: float
    ratio_gap: float
    scale: float
    method: str
    tol: float
    volume_tol: float
    residual_errors: list = field(default_factory=list)

    @property
    def valid(self):
        n = len(self.apex)
        inf, sup = self.range_check
        return (
            all(r <= self.volume_tol for _, r in self.homothety_residuals)
            and abs(inf + 1.0) <= self.tol
            and abs(sup - 1.0 / n) <= self.tol
            and abs(self.mean_residual) <= self.tol
            and self.ratio_gap <= self.tol
        )

    def __bool__(self):
        return self.valid

    def to_dict(self):
        return {
            "apex": [float(v) for v in self.apex],
            "homothety_residuals": [[float(a), float(r)] for a, r in self.homothety_residuals],
            "residual_errors": [float(e) for e in self.residual_errors],
            "range_check": {"inf": self.range_check[0], "sup": self.range_check[1]},
            "mean_residual": self.mean_residual,
            "ratio_gap": self.ratio_gap,
            "scale": self.scale,
            "method": self.method,
            "valid": self.valid,
        }


class _Scaled(ConvexFn):
    def __init__(self, base, r):
        self.base, self.r, self.dim = base, float(r), base.dim

    def __call__(self, x):
        return self.r * np.asarray(self.base(x))


def _scaled(f, r):
    base, shift = _split_shift(f)
    if isinstance(base, (MaxAffine, GaugeExtremizer)):
        return as_max_affine(f).scaled(r)
    return _Scaled(f, r)


def default_levels(n, count=5):
    return list(np.linspace(-1.0, 1.0 / n, count + 2)[1:-1])


def _exact_residual(ma, P, y, a):
    s = n_scale(P.dim, a)
    A = pt.intersect(P, ma.slopes, a - ma.intercepts)[0]
    H = pt.homothety(P, y, s)
    both = pt.intersect(H, ma.slopes, a - ma.intercepts)[0]
    return max(A + H.volume - 2.0 * both, 0.0) / P.volume


def n_scale(n, a):
    """Homothety ratio ``n(a+1)/(n+1)`` of the level ``a`` sublevel set."""
    return n * (a + 1.0) / (n + 1.0)


def _mc_residual(g, P, y, a, X, vals):
    H = pt.homothety(P, y, n_scale(P.dim, a))
    diff = (vals < a) != pt.contains(H, X)
    p = float(diff.mean())
    return p, 3.0 * math.sqrt(p * (1.0 - p) / len(X))


def certify_extremizer(f, P, levels=None, tol=1e-6, volume_tol=None, method="auto", seed=0, threads=1):
    """Check that ``f`` is an extremizer of the ratio on ``P``.

    ``f`` is first rescaled so that its infimum is ``-1``; the apex is the
    minimiser.  Raises :class:`NoNegativePart` when ``inf f >= 0``.

    Parameters
    ----------
    levels
        Levels ``a`` in ``(-1, 1/n)``; five equispaced levels by default.
    tol
        Tolerance for the range, mean and ratio checks.
    volume_tol
        Tolerance on each symmetric-difference fraction; ``1e-9`` for the
        exact route and ``1e-3`` for Monte Carlo.
    method
        ``"auto"``, ``"exact"`` or ``"monte_carlo"``.
    """
    n = P.dim
    inf0, _ = infimum_over_closure(f, P)
    if not inf0 < 0:
        raise NoNegativePart(f"infimum {inf0:.3g} is not negative")
    r = -1.0 / inf0
    g = _scaled(f, r)
    levels = default_levels(n) if levels is None else [float(a) for a in levels]
    for a in levels:
        if not -1.0 < a <= 1.0 / n:
            raise ValueError(f"level {a} outside (-1, 1/n]")
    inf, y = infimum_over_closure(g, P)
    sup = supremum_over_closure(g, P)
    if method == "auto":
        method = "exact" if isinstance(g, MaxAffine) else "monte_carlo"
    errors = []
    if method == "exact":
        ma = as_max_affine(g)
        job = lambda a: _exact_residual(ma, P, y, a)
        volume_tol = 1e-9 if volume_tol is None else volume_tol
    elif method == "monte_carlo":
        X = pt.sample_uniform(P, MC_SAMPLES, np.random.default_rng(seed))
        vals = _points_eval(g, X)
        job = lambda a: _mc_residual(g, P, y, a, X, vals)
        volume_tol = 1e-3 if volume_tol is None else volume_tol
    else:
        raise ValueError(f"unknown method {method!r}")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            out = list(pool.map(job, levels))
    else:
        out = [job(a) for a in levels]
    if method == "monte_carlo":
        errors = [e for _, e in out]
        out = [p for p, _ in out]
    if isinstance(g, MaxAffine):
        mean = mean_value(g, P)
        ratio = ratio_report(g, P).ratio
    else:
        vol = P.volume
        mean = monte_carlo_integral(g, P, seed=seed).value / vol
        absm = monte_carlo_integral(lambda x: np.asarray(g(x)) - mean, P, seed=seed + 1, absolute=True).value / vol
        ratio = absm / -(inf - mean)
    return ExtremizerCertificate(
        apex=np.asarray(y, dtype=float),
        homothety_residuals=list(zip(levels, out)),
        range_check=(float(inf), float(sup)),
        mean_residual=float(mean),
        ratio_gap=abs(ratio - sharp_constant(n)),
        scale=r,
        method=method,
        tol=tol,
        volume_tol=volume_tol,
        residual_errors=errors,
    )


@dataclass(frozen=True)
class ConeHalfspaceDecomposition:
    """``P = (y + cone) ∩ {normal . x < offset}``.

    ``defining_function`` is the linear ``chi`` with
    ``H - y = {chi < 1 + 1/n}``; the affine extremizer is ``chi(x - y) - 1``.
    """

    apex: np.ndarray
    halfspace_normal: np.ndarray
    halfspace_offset: float
    defining_function: AffinePiece
    candidates: list

    def extremizer(self):
        s = self.defining_function.slope
        return MaxAffine(s[None, :], [-(s @ self.apex) - 1.0])

    def to_dict(self):
        return {
            "apex": [float(v) for v in self.apex],
            "halfspace_normal": [float(v) for v in self.halfspace_normal],
            "halfspace_offset": float(self.halfspace_offset),
            "chi_slope": [float(v) for v in self.defining_function.slope],
            "candidates": [[float(v) for v in c] for c in self.candidates],
        }


def detect_affine_extremizer(P):
    """Find a vertex lying on every facet but one, or return ``None``.

    Only vertices can qualify: a point on ``m - 1`` of the ``m >= n + 1``
    facet hyperplanes of a bounded polytope is a vertex.  When several do,
    the lexicographically smallest is used and all are listed.
    """
    n = P.dim
    facets = np.array(P.facets)
    act = P.active_matrix[:, facets]
    hits = []
    for v_idx in range(len(P.vertices)):
        off = np.flatnonzero(~act[v_idx])
        if len(off) == 1:
            hits.append((v_idx, int(facets[off[0]])))
    if not hits:
        return None
    v_idx, j = hits[0]  # vertices are stored in lexicographic order
    y = P.vertices[v_idx]
    a, b = P.A[j], float(P.b[j])
    slope = (1.0 + 1.0 / n) * a / (b - a @ y)
    return ConeHalfspaceDecomposition(
        apex=y.copy(),
        halfspace_normal=a.copy(),
        halfspace_offset=b,
        defining_function=AffinePiece(slope, 0.0),
        candidates=[P.vertices[i].copy() for i, _ in hits],
    )


def gauge_max_affine(P, y):
    """``gauge_{P-y}(x - y)`` as a max-affine function on ``closure(P)``."""
    n = P.dim
    phi = GaugeExtremizer(P, y).to_max_affine()
    c = n / (n + 1.0)
    return MaxAffine(phi.slopes * c, (phi.intercepts + 1.0) * c)


def near_extremizer_family(P, y, epsilon):
    """Mean-zero ``max(0, (gauge - (1 - eps))/eps)``, a near-extremizer for the constant 2.

    It vanishes on the homothety of ratio ``1 - eps`` about ``y`` and its
    ratio tends to 2 as ``eps -> 0``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    gm = gauge_max_affine(P, y)
    slopes = np.vstack([np.zeros((1, P.dim)), gm.slopes / epsilon])
    intercepts = np.concatenate([[0.0], (gm.intercepts - (1.0 - epsilon)) / epsilon])
    return normalize_mean_zero(MaxAffine(slopes, intercepts), P)
