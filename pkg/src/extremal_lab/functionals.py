"""Infimum, mean-zero normalisation and the ratio ``mean|phi| / (-inf phi)``.

For mean-zero convex ``phi`` on an ``n``-dimensional polytope the ratio lies
in ``[c_n, 2]`` with ``c_n = 2/(n+1) * (n/(n+1))**n``.  The lower endpoint is
attained by the gauge extremizers; the upper one is approached but never
attained.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from . import polytope as pt
from .convex import GaugeExtremizer, Grid, MaxAffine, Shifted, as_max_affine
from .errors import NonConvergence, UnsupportedVariant
from .integration import _split_shift, layer_cake_abs, layer_cake_integral, piecewise_parts, sublevel_volume

RATIO_TOL = 1e-7
UPPER = 2.0


def sharp_constant(n, exact=False):
    """``2/(n+1) * (n/(n+1))**n``; a :class:`~fractions.Fraction` if ``exact``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    c = Fraction(2, n + 1) * Fraction(n, n + 1) ** n
    return c if exact else float(c)


def _polish(ma, P, x, t):
    """Re-solve the LP optimum on its active set to remove solver tolerance."""
    n = P.dim
    A = np.vstack([np.hstack([P.A, np.zeros((P.n_halfspaces, 1))]), np.hstack([ma.slopes, -np.ones((len(ma.intercepts), 1))])])
    b = np.concatenate([P.b, -ma.intercepts])
    z = np.append(x, t)
    resid = b - A @ z
    act = resid <= 1e-6 * (1.0 + np.abs(b))
    if act.sum() < n + 1 or np.linalg.matrix_rank(A[act]) < n + 1:
        return x, t
    z2 = np.linalg.lstsq(A[act], b[act], rcond=None)[0]
    scale = 1e-9 * (1.0 + np.abs(b))
    if np.all(A @ z2 <= b + scale) and z2[-1] <= t + 1e-9 * (1 + abs(t)):
        return z2[:n], float(z2[-1])
    return x, t


def _lp_min(ma, P, tie_break):
    n = P.dim
    k = len(ma.intercepts)
    A_ub = np.vstack([np.hstack([P.A, np.zeros((P.n_halfspaces, 1))]), np.hstack([ma.slopes, -np.ones((k, 1))])])
    b_ub = np.concatenate([P.b, -ma.intercepts])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    bounds = [(None, None)] * (n + 1)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise NonConvergence(f"LP for the infimum failed: {res.message}")
    x, t = _polish(ma, P, res.x[:n], float(res.x[-1]))
    if not tie_break:
        return t, x
    # lexicographically smallest point of the (possibly non-singleton) argmin face
    A_eq, b_eq = [], []
    cap = t + 1e-9 * (1.0 + abs(t))
    fixed = np.append(np.zeros(n), 1.0)
    A2 = np.vstack([A_ub, fixed])
    b2 = np.append(b_ub, cap)
    cur = x
    for j in range(n):
        cj = np.zeros(n + 1)
        cj[j] = 1.0
        r = linprog(cj, A_ub=A2, b_ub=b2, A_eq=np.array(A_eq) if A_eq else None,
                    b_eq=np.array(b_eq) if b_eq else None, bounds=bounds, method="highs")
        if r.status != 0:
            break
        row = np.zeros(n + 1)
        row[j] = 1.0
        A_eq.append(row)
        b_eq.append(r.x[j])
        cur = r.x[:n]
    if np.max(np.abs(cur - x)) > 1e-7:
        y, _ = _polish(ma, P, cur, float(ma(cur)))
        if float(ma(y)) <= t + 1e-12 * (1.0 + abs(t)):
            x = y
    return t, x


def infimum_over_closure(f, P, tie_break=True):
    """``(min_{closure P} f, argmin)``.

    Extremizers return their apex exactly.  Max-affine functions are
    minimised by the epigraph LP ``min t : pieces <= t, x in closure P``.
    With ``tie_break`` the lexicographically smallest minimiser is returned.
    """
    base, shift = _split_shift(f)
    if isinstance(base, GaugeExtremizer):
        return -1.0 + shift, base.apex.copy()
    if isinstance(base, Grid):
        vals = np.asarray(base.values).ravel()
        i = int(np.argmin(vals))
        return float(vals[i]) + shift, base.nodes[i]
    ma = as_max_affine(f)
    # solve at unit scale so solver tolerances act relative to f
    v = P.vertices @ ma.slopes.T + ma.intercepts
    scale = float(np.max(np.abs(v))) or 1.0
    t, x = _lp_min(MaxAffine(ma.slopes / scale, ma.intercepts / scale), P, tie_break)
    t *= scale
    val = float(ma(x))
    if val > t + 1e-7 * (1.0 + abs(t)):
        raise NonConvergence("minimiser does not attain the LP value", best=x, value=val)
    return val, x


def supremum_over_closure(f, P):
    """Convex functions peak at a vertex of the closure."""
    return float(np.max(np.atleast_1d(f(P.vertices if P.dim > 1 else P.vertices[:, 0]))))


def mean_value(f, P):
    base, _ = _split_shift(f)
    if isinstance(base, GaugeExtremizer):
        return layer_cake_integral(f, P).value / P.volume
    return piecewise_parts(f, P, split=False).integral / P.volume


def normalize_mean_zero(f, P):
    """``Shifted(f, -mean f)``; max-affine inputs stay max-affine."""
    m = mean_value(f, P)
    if isinstance(f, MaxAffine):
        return f.shifted(-m)
    if isinstance(f, Shifted):
        return Shifted(f.base, f.constant - m)
    return Shifted(f, -m)


@dataclass(frozen=True)
class FunctionalReport:
    dim: int
    infimum: float
    argmin: np.ndarray
    mean_residual: float
    abs_mean: float
    ratio: float
    sharp_lower: float
    upper: float
    verdict: str
    negative_volume: float
    degenerate: bool = False

    @property
    def a_constant(self):
        """Mean of ``|phi|`` over ``{phi < 0}``: ``abs_mean / (2 * negative_volume)``."""
        if self.degenerate or self.negative_volume <= 0:
            return math.nan
        return self.abs_mean / (2.0 * self.negative_volume)

    @property
    def a_scaled(self):
        """``a_constant / (-infimum)``; never below ``1/(n + 1)``."""
        return self.a_constant / -self.infimum if not self.degenerate else math.nan

    def to_dict(self):
        return {
            "dim": self.dim,
            "infimum": self.infimum,
            "argmin": [float(v) for v in self.argmin],
            "mean_residual": self.mean_residual,
            "abs_mean": self.abs_mean,
            "ratio": self.ratio,
            "sharp_lower": self.sharp_lower,
            "upper": self.upper,
            "verdict": self.verdict,
            "negative_volume_fraction": self.negative_volume,
            "degenerate": self.degenerate,
            "a_constant": self.a_constant,
        }


def verdict_for(ratio, n, tol=RATIO_TOL):
    if ratio < sharp_constant(n) - tol:
        return "lower_violation"
    if ratio > UPPER + tol:
        return "upper_violation"
    return "within_bounds"


def ratio_report(f, P, tol=RATIO_TOL, tie_break=True):
    """Normalise ``f`` to mean zero and assemble the :class:`FunctionalReport`.

    ``negative_volume`` in the report is the fraction ``vol{phi<0}/vol P``.
    """
    n = P.dim
    vol = P.volume
    g = normalize_mean_zero(f, P)
    base, _ = _split_shift(g)
    if isinstance(base, GaugeExtremizer):
        abs_int = layer_cake_abs(g, P).value
        mean_res = layer_cake_integral(g, P).value / vol
        neg_frac = sublevel_volume(g, P, 0.0) / vol
    elif isinstance(base, MaxAffine):
        parts = piecewise_parts(g, P)
        abs_int = parts.absolute
        mean_res = parts.integral / vol
        neg_frac = parts.negative_volume / vol
    else:
        raise UnsupportedVariant(f"ratio_report does not support {type(base).__name__}")
    inf, argmin = infimum_over_closure(g, P, tie_break=tie_break)
    abs_mean = abs_int / vol
    if inf >= -1e-12 * (1.0 + abs_mean):
        return FunctionalReport(n, inf, argmin, mean_res, abs_mean, math.nan, sharp_constant(n), UPPER,
                                "within_bounds", neg_frac, degenerate=True)
    ratio = abs_mean / -inf
    return FunctionalReport(n, inf, argmin, mean_res, abs_mean, ratio, sharp_constant(n), UPPER,
                            verdict_for(ratio, n, tol), neg_frac)


def random_max_affine(n, rng, P):
    """Random mean-zero max-affine function with ``inf < -1e-3`` on ``P``."""
    while True:
        k = int(rng.integers(2, 2 * n + 4))
        f = MaxAffine(rng.uniform(-3.0, 3.0, size=(k, n)), rng.uniform(-1.0, 1.0, size=k))
        g = normalize_mean_zero(f, P)
        if infimum_over_closure(g, P, tie_break=False)[0] < -1e-3:
            return g


def trial_seeds(master_seed, trials):
    """Independent per-trial generators spawned from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(master_seed).spawn(trials)]


def _one_trial(args):
    n, rng, P = args
    if P is None:
        P = pt.random_polytope(n, rng)
    return ratio_report(random_max_affine(n, rng, P), P, tie_break=False)


def run_campaign(n, trials, seed=0, polytope=None, threads=1):
    """Check the two-sided inequality on ``trials`` random instances.

    Returns the summary dict and the list of per-trial reports.
    """
    jobs = [(n, rng, polytope) for rng in trial_seeds(seed, trials)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            reports = list(pool.map(_one_trial, jobs))
    else:
        reports = [_one_trial(j) for j in jobs]
    ratios = [r.ratio for r in reports if not r.degenerate]
    summary = {
        "trials": trials,
        "violations": sum(r.verdict != "within_bounds" for r in reports),
        "min_ratio": min(ratios) if ratios else math.nan,
        "max_ratio": max(ratios) if ratios else math.nan,
        "c_n": sharp_constant(n),
    }
    return summary, reports
