"""Mass bookkeeping for model rays built from a plurisupported current.

The model ray with parameters ``a < b`` in dimension ``n`` has speed
``udot`` whose super-level masses are

    vol{udot >= tau} / V = 1                          (tau <= a)
                         = ((b - tau)/(b - a))**n     (a < tau < b)
                         = 0                          (tau >= b),

which is the profile ``s -> (1 - s)**n V`` at ``s = (tau - a)/(b - a)``.
Everything below is arithmetic on this profile:

* ``I = b - n(b - a)/(n + 1)``, the mean of ``udot``,
* ``J = b - I``,
* ``d1 = int |udot| / V``, by the layer-cake formula.

For ``(a, b) = (-1/n, 1)`` these give ``I = 0``, ``J = 1`` and
``d1 = 2 n**n / (n + 1)**(n + 1)``.  Inputs that are ``int`` or
:class:`~fractions.Fraction` are evaluated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .functionals import sharp_constant

RIGIDITY_TOL = 1e-9


def mass_profile(s, n, V=1):
    """``(1 - s)**n * V`` for ``s`` in ``[0, 1]``."""
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    return (1 - s) ** n * V


@dataclass(frozen=True)
class MassProfile:
    """A total-mass profile ``s -> mass`` on ``[0, 1]`` in dimension ``n``."""

    func: Callable
    n: int
    V: float = 1.0
    name: str = "custom"

    @classmethod
    def plurisupported(cls, n, V=1.0):
        return cls(lambda s: mass_profile(s, n, V), n, V, "plurisupported")

    def __call__(self, s):
        return self.func(s)

    def sample(self, grid):
        return np.array([float(self.func(float(s))) for s in grid])


@dataclass(frozen=True)
class RadialRayModel:
    """Parameters ``(a, b, n, V)`` of the model ray; ``a`` and ``b`` are the speed extremes."""

    tau_minus: object
    tau_plus: object
    dim: int
    total_mass: object = 1

    def __post_init__(self):
        for name in ("tau_minus", "tau_plus", "total_mass"):
            v = getattr(self, name)
            if isinstance(v, int):
                object.__setattr__(self, name, Fraction(v))
        if not self.tau_minus < self.tau_plus:
            raise ValueError("tau_minus must be smaller than tau_plus")
        if not self.total_mass > 0:
            raise ValueError("total mass must be positive")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dim must be a positive integer")

    @classmethod
    def canonical(cls, n, V=1):
        """The energy-normalised extremal model ``(a, b) = (-1/n, 1)``."""
        return cls(Fraction(-1, n), Fraction(1), n, V)

    @property
    def profile(self):
        return MassProfile.plurisupported(self.dim, self.total_mass)

    def mass_fraction(self, tau):
        """``vol{udot >= tau} / V``."""
        a, b, n = self.tau_minus, self.tau_plus, self.dim
        if tau <= a:
            return 1
        if tau >= b:
            return 0
        return ((b - tau) / (b - a)) ** n


def radial_ma_energy(model):
    """``I = b - n(b - a)/(n + 1)``."""
    a, b, n = model.tau_minus, model.tau_plus, model.dim
    return b - n * (b - a) / (n + 1)


def radial_j(model):
    """``J = b - I``; equals ``b`` on energy-normalised rays."""
    return model.tau_plus - radial_ma_energy(model)


def _tail(b, w, n, lo, hi):
    """``int_lo^hi ((b - t)/w)**n dt``."""
    return ((b - lo) ** (n + 1) - (b - hi) ** (n + 1)) / ((n + 1) * w**n)


def radial_d1(model):
    """``int |udot| / V`` by the layer-cake formula.

    ``int_0^inf m(t) dt + int_{-inf}^0 (1 - m(t)) dt`` with ``m`` the
    super-level mass fraction.
    """
    a, b, n = model.tau_minus, model.tau_plus, model.dim
    w = b - a
    if a >= 0:
        return radial_ma_energy(model)
    if b <= 0:
        return -radial_ma_energy(model)
    pos = _tail(b, w, n, 0, b)
    neg = -a - _tail(b, w, n, a, 0)
    return pos + neg


def extremal_ratio(n, exact=False):
    """``J / d1`` on the canonical model: ``(n + 1)**(n + 1) / (2 n**n)``."""
    m = RadialRayModel.canonical(n)
    r = Fraction(radial_j(m)) / Fraction(radial_d1(m))
    return r if exact else float(r)


# ----------------------------------------------------------------------------
# quadrature cross-checks


def _quad(g, lo, hi, points=None):
    if hi <= lo:
        return 0.0
    val, _ = quad(g, lo, hi, points=points, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def radial_ma_energy_quad(model):
    a, b = float(model.tau_minus), float(model.tau_plus)
    n, V = model.dim, float(model.total_mass)
    g = lambda t: (mass_profile((t - a) / (b - a), n, V) - V) / V
    return _quad(g, a, b) + b


def radial_d1_quad(model):
    a, b = float(model.tau_minus), float(model.tau_plus)
    m = lambda t: float(model.mass_fraction(t))
    pos = _quad(m, max(a, 0.0), b) + max(a, 0.0)
    neg = _quad(lambda t: 1.0 - m(t), a, min(b, 0.0)) - min(b, 0.0)
    return pos + neg if a < 0 else pos


def cross_check(model):
    """Largest discrepancy between the closed forms and adaptive quadrature."""
    return max(
        abs(float(radial_ma_energy(model)) - radial_ma_energy_quad(model)),
        abs(float(radial_d1(model)) - radial_d1_quad(model)),
    )


# ----------------------------------------------------------------------------
# profile tests


@dataclass(frozen=True)
class ProfileCheck:
    ok: bool
    witness: tuple | None = None
    max_defect: float = 0.0

    def __bool__(self):
        return self.ok


def concavity_check(profile, grid, tol=1e-12):
    """Discrete concavity of ``s -> profile(s)**(1/n)`` on consecutive grid triples."""
    s = np.asarray(grid, dtype=float)
    if len(s) < 3:
        return ProfileCheck(True)
    root = np.maximum(profile.sample(s), 0.0) ** (1.0 / profile.n)
    lam = (s[1:-1] - s[:-2]) / (s[2:] - s[:-2])
    chord = (1 - lam) * root[:-2] + lam * root[2:]
    defect = chord - root[1:-1]
    i = int(np.argmax(defect))
    if defect[i] > tol * (1.0 + abs(root[i + 1])):
        return ProfileCheck(False, (s[i], s[i + 1], s[i + 2]), float(defect[i]))
    return ProfileCheck(True, None, float(max(defect[i], 0.0)))


def equality_rigidity_check(profile, a_grid, tau_minus=0.0, tau_plus=1.0, tol=RIGIDITY_TOL):
    """Does the profile equal ``((tau+ - s)/(tau+ - tau-))**n * V`` on ``a_grid``?"""
    s = np.asarray(a_grid, dtype=float)
    law = ((tau_plus - s) / (tau_plus - tau_minus)) ** profile.n * float(profile.V)
    err = np.abs(profile.sample(s) - law)
    i = int(np.argmax(err))
    ok = bool(err[i] <= tol * (1.0 + abs(law[i])))
    return ProfileCheck(ok, None if ok else (float(s[i]),), float(err[i]))


def radial_report(model, grid_points=101):
    a, b, n = model.tau_minus, model.tau_plus, model.dim
    d1 = radial_d1(model)
    J = radial_j(model)
    grid = np.linspace(0.0, 1.0, grid_points)
    return {
        "n": n,
        "a": float(a),
        "b": float(b),
        "I": float(radial_ma_energy(model)),
        "J": float(J),
        "d1": float(d1),
        "ratio": float(Fraction(J) / Fraction(d1)) if d1 else math.nan,
        "sharp_constant": sharp_constant(n),
        "rigidity": bool(equality_rigidity_check(model.profile, grid)),
    }
