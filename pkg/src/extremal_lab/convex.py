"""Convex functions on polytopes and their grid Legendre transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import polytope as pt
from .errors import OutsideDomain, ResolutionTooCoarse, UnsupportedVariant


@dataclass(frozen=True)
class AffinePiece:
    """``x -> slope . x + intercept``."""

    slope: np.ndarray
    intercept: float

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.slope, dtype=float))
        if not (np.all(np.isfinite(s)) and np.isfinite(self.intercept)):
            raise ValueError("affine piece entries must be finite")
        object.__setattr__(self, "slope", s)
        object.__setattr__(self, "intercept", float(self.intercept))

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.slope + self.intercept


class ConvexFn:
    """Base class; subclasses implement ``__call__`` on ``(n,)`` or ``(k, n)`` input."""

    dim: int

    def __call__(self, x):
        raise NotImplementedError

    def shifted(self, constant):
        return Shifted(self, float(constant))


def _finish(values, x_in, dim):
    x_arr = np.asarray(x_in)
    if x_arr.ndim == 0 or (x_arr.ndim == 1 and x_arr.shape[0] == dim and dim != 1):
        return float(values[0])
    if dim == 1 and x_arr.ndim == 1 and x_arr.shape[0] == 1:
        return float(values[0])
    return values


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if dim == 1:
        return x.reshape(-1, 1)
    return x.reshape(-1, dim)


class MaxAffine(ConvexFn):
    """Pointwise maximum of finitely many affine pieces."""

    def __init__(self, slopes, intercepts):
        slopes = np.asarray(slopes, dtype=float)
        intercepts = np.atleast_1d(np.asarray(intercepts, dtype=float))
        if slopes.ndim == 1:
            slopes = slopes.reshape(len(intercepts), -1)
        if slopes.shape[0] != intercepts.shape[0] or slopes.shape[0] == 0:
            raise ValueError("need a nonempty list of pieces with matching intercepts")
        if not (np.all(np.isfinite(slopes)) and np.all(np.isfinite(intercepts))):
            raise ValueError("affine piece entries must be finite")
        self.slopes = slopes
        self.intercepts = intercepts
        self.dim = slopes.shape[1]

    @classmethod
    def from_pieces(cls, pieces):
        pieces = list(pieces)
        return cls(np.array([p.slope for p in pieces]), [p.intercept for p in pieces])

    @classmethod
    def constant(cls, value, dim):
        return cls(np.zeros((1, dim)), [value])

    @property
    def pieces(self):
        return [AffinePiece(s, c) for s, c in zip(self.slopes, self.intercepts)]

    def __call__(self, x):
        pts = _as_points(x, self.dim)
        vals = (pts @ self.slopes.T + self.intercepts).max(axis=1)
        return _finish(vals, x, self.dim)

    def scaled(self, r):
        return MaxAffine(r * self.slopes, r * self.intercepts)

    def shifted(self, constant):
        return MaxAffine(self.slopes, self.intercepts + constant)

    def __add__(self, other):
        if not isinstance(other, MaxAffine):
            return NotImplemented
        s = (self.slopes[:, None, :] + other.slopes[None, :, :]).reshape(-1, self.dim)
        c = (self.intercepts[:, None] + other.intercepts[None, :]).reshape(-1)
        return MaxAffine(s, c).simplified()

    def simplified(self, tol=1e-12):
        """Merge parallel pieces, keeping the highest (duplicates double-count regions)."""
        order = np.argsort(-self.intercepts, kind="stable")
        keep = []
        for i in order:
            row = self.slopes[i]
            if not any(np.max(np.abs(self.slopes[j] - row)) <= tol * (1 + np.max(np.abs(row))) for j in keep):
                keep.append(i)
        keep.sort()
        return MaxAffine(self.slopes[keep], self.intercepts[keep])

    def __repr__(self):
        return f"MaxAffine(pieces={len(self.intercepts)}, dim={self.dim})"


class GaugeExtremizer(ConvexFn):
    """The extremizer with apex ``y``: ``((1 + n)/n) * gauge_{P - y}(x - y) - 1``.

    Its sublevel set ``{< a}`` is the homothety of ``P`` toward ``y`` with
    ratio ``n (a + 1) / (n + 1)``; values range over ``[-1, 1/n]``.
    """

    def __init__(self, P, apex):
        y, _ = pt._check_apex(P, apex)
        self.P = P
        self.apex = y
        self.dim = P.dim

    def __call__(self, x):
        pts = _as_points(x, self.dim)
        if not np.all(pt.contains(self.P, pts, 1e-7)):
            raise OutsideDomain("point outside the closure of P")
        n = self.dim
        g = np.atleast_1d(pt.gauge(self.P, self.apex, pts - self.apex))
        vals = np.clip((1.0 + n) / n * g - 1.0, -1.0, 1.0 / n)
        return _finish(vals, x, self.dim)

    def to_max_affine(self):
        """Equivalent max-affine representation, valid on the closure of ``P``.

        Facets through the apex never bind inside ``P`` and are dropped.
        """
        P, y, n = self.P, self.apex, self.dim
        slack = P.b - P.A @ y
        keep = slack > P.tol * (1.0 + np.max(np.abs(P.b)))
        coef = (1.0 + n) / n / slack[keep]
        slopes = P.A[keep] * coef[:, None]
        intercepts = -(slopes @ y) - 1.0
        return MaxAffine(slopes, intercepts).simplified()

    def __repr__(self):
        return f"GaugeExtremizer(apex={self.apex.tolist()})"


class Shifted(ConvexFn):
    def __init__(self, base, constant):
        self.base = base
        self.constant = float(constant)
        self.dim = base.dim

    def __call__(self, x):
        vals = self.base(x)
        return vals + self.constant

    def shifted(self, constant):
        return Shifted(self.base, self.constant + constant)

    def __repr__(self):
        return f"Shifted({self.base!r}, {self.constant:+.6g})"


@dataclass(eq=False)
class Grid(ConvexFn):
    """Samples on a tensor grid, evaluated by multilinear interpolation.

    ``saturated`` marks nodes whose value was attained on the boundary of
    the sampling box during a Legendre transform (value depends on the box).
    """

    axes: tuple
    values: np.ndarray
    saturated: np.ndarray | None = None
    _interp: RegularGridInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        self.values = np.asarray(self.values, dtype=float)
        self.dim = len(self.axes)
        self.values.setflags(write=False)
        self._interp = RegularGridInterpolator(self.axes, self.values, method="linear")

    @property
    def lower(self):
        return np.array([a[0] for a in self.axes])

    @property
    def upper(self):
        return np.array([a[-1] for a in self.axes])

    @property
    def nodes(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def __call__(self, x):
        pts = _as_points(x, self.dim)
        lo, hi = self.lower, self.upper
        slack = 1e-9 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
        if np.any(pts < lo - slack) or np.any(pts > hi + slack):
            raise OutsideDomain("point outside the grid box")
        vals = self._interp(np.clip(pts, lo, hi))
        return _finish(vals, x, self.dim)


def evaluate(f, x):
    return f(x)


def as_max_affine(f):
    """Max-affine form of ``f`` on its domain, or raise :class:`UnsupportedVariant`."""
    if isinstance(f, MaxAffine):
        return f.simplified()
    if isinstance(f, GaugeExtremizer):
        return f.to_max_affine()
    if isinstance(f, Shifted):
        return as_max_affine(f.base).shifted(f.constant)
    raise UnsupportedVariant(f"{type(f).__name__} has no piecewise-linear form")


def _box_axes(domain_box, resolution):
    box = np.asarray(domain_box, dtype=float).reshape(-1, 2)
    if resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    return tuple(np.linspace(lo, hi, resolution) for lo, hi in box)


def _grid_values(f, axes):
    if isinstance(f, Grid) and len(f.axes) == len(axes) and all(
        len(a) == len(b) and np.allclose(a, b) for a, b in zip(f.axes, axes)
    ):
        return np.asarray(f.values)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return np.asarray(f(pts) if len(axes) > 1 else f(pts[:, 0]), dtype=float).reshape(mesh[0].shape)


def _discrete_conjugate(x_pts, fx, s_pts, chunk=1 << 22):
    """``max_j <s, x_j> - f(x_j)`` and the maximizing node index for each slope."""
    out = np.empty(len(s_pts))
    arg = np.empty(len(s_pts), dtype=np.intp)
    step = max(1, chunk // max(1, len(x_pts)))
    for start in range(0, len(s_pts), step):
        block = s_pts[start : start + step] @ x_pts.T - fx
        arg[start : start + step] = block.argmax(axis=1)
        out[start : start + step] = block.max(axis=1)
    return out, arg


def _slope_box(axes, values):
    box = []
    for j, a in enumerate(axes):
        diffs = np.diff(values, axis=j) / np.expand_dims(np.diff(a), tuple(i for i in range(values.ndim) if i != j))
        lo, hi = float(diffs.min()), float(diffs.max())
        if hi - lo <= 1e-9 * (1.0 + abs(lo)):
            # affine along this axis: any small window around the slope will do
            lo, hi = lo, hi + 1.0
        box.append((lo, hi))
    return box


def _nodes(axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _second_difference_ok(values, axes, tol):
    scale = 1.0 + np.max(np.abs(values))
    for j in range(values.ndim):
        if values.shape[j] < 3:
            continue
        h = np.diff(axes[j])
        d = np.diff(values, axis=j) / np.expand_dims(h, tuple(i for i in range(values.ndim) if i != j))
        if np.any(np.diff(d, axis=j) < -tol * scale / max(h.min(), 1e-300)):
            return False
    return True


def legendre_transform(f, domain_box, grid_resolution, slope_box=None):
    """Grid Legendre-Fenchel conjugate ``s -> sup_x <s, x> - f(x)``.

    The sup runs over the ``grid_resolution**n`` nodes of ``domain_box``.
    Slopes are sampled on ``slope_box``, by default the range of discrete
    gradients of ``f`` on the grid (outside it the conjugate measures the
    box rather than ``f``).
    """
    axes = _box_axes(domain_box, grid_resolution)
    fx = _grid_values(f, axes)
    if slope_box is None:
        slope_box = _slope_box(axes, fx)
    s_axes = _box_axes(slope_box, grid_resolution)
    x_pts = _nodes(axes)
    g, arg = _discrete_conjugate(x_pts, fx.ravel(), _nodes(s_axes))
    g = g.reshape(tuple(len(a) for a in s_axes))
    on_edge = np.zeros(len(arg), dtype=bool)
    idx = np.unravel_index(arg, fx.shape)
    for j, a in enumerate(axes):
        on_edge |= (idx[j] == 0) | (idx[j] == len(a) - 1)
    if not _second_difference_ok(g, s_axes, 1e-9):
        raise ResolutionTooCoarse("grid conjugate failed the discrete convexity test")
    return Grid(s_axes, g, on_edge.reshape(g.shape))


def involution_residual(psi, box, resolution):
    """``max |psi** - psi|`` on the cell centres of the sampling grid.

    The double conjugate is built from nodes of the ``resolution`` grid and
    checked at the staggered points between them, so the residual reflects
    the interpolation error rather than vanishing identically at nodes.
    """
    axes = _box_axes(box, resolution)
    conj = legendre_transform(psi, box, resolution)
    mids = tuple(0.5 * (a[1:] + a[:-1]) for a in axes)
    x_mid = _nodes(mids)
    back, _ = _discrete_conjugate(_nodes(conj.axes), conj.values.ravel(), x_mid)
    exact = _grid_values(psi, mids).ravel()
    return float(np.max(np.abs(back - exact)))


@dataclass(frozen=True)
class ConvexityCheck:
    convex: bool
    witness: tuple | None = None
    max_violation: float = 0.0

    def __bool__(self):
        return self.convex


def check_convexity(f, P=None, samples=1000, seed=0, tol=1e-9):
    """Sampled midpoint test ``f((x+y)/2) <= (f(x)+f(y))/2 + tol``.

    ``P`` defaults to the grid box for :class:`Grid` inputs.
    """
    rng = np.random.default_rng(seed)
    if P is None:
        if not isinstance(f, Grid):
            raise ValueError("a polytope is required for non-grid functions")
        P = pt.box(f.lower, f.upper)
    x = pt.sample_uniform(P, samples, rng)
    y = pt.sample_uniform(P, samples, rng)
    fx, fy, fm = (np.atleast_1d(f(z if P.dim > 1 else z[:, 0])) for z in (x, y, 0.5 * (x + y)))
    viol = fm - 0.5 * (fx + fy)
    bound = tol * (1.0 + np.abs(fx) + np.abs(fy))
    worst = int(np.argmax(viol - bound))
    if viol[worst] > bound[worst]:
        return ConvexityCheck(False, (x[worst].copy(), y[worst].copy()), float(viol[worst]))
    return ConvexityCheck(True, None, float(max(viol.max(), 0.0)))


def to_dict(f):
    if isinstance(f, MaxAffine):
        return {
            "type": "max_affine",
            "pieces": [
                {"slope": [float(v) for v in s], "intercept": float(c)}
                for s, c in zip(f.slopes, f.intercepts)
            ],
        }
    if isinstance(f, GaugeExtremizer):
        return {"type": "gauge_extremizer", "polytope": f.P.to_dict(), "apex": [float(v) for v in f.apex]}
    if isinstance(f, Shifted):
        return {"type": "shifted", "base": to_dict(f.base), "constant": f.constant}
    raise UnsupportedVariant(f"{type(f).__name__} is not serializable")


def from_dict(data):
    kind = data.get("type")
    if kind == "max_affine":
        pieces = data["pieces"]
        return MaxAffine([p["slope"] for p in pieces], [p["intercept"] for p in pieces])
    if kind == "gauge_extremizer":
        return GaugeExtremizer(pt.Polytope.from_dict(data["polytope"]), data["apex"])
    if kind == "shifted":
        return Shifted(from_dict(data["base"]), data["constant"])
    raise ValueError(f"unknown convex function type {kind!r}")
