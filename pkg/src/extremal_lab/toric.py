"""Polytope side of torus-invariant potentials.

A toric potential ``u`` is represented by the Legendre transform
``phi_u`` of its convex potential, a convex function on the moment
polytope ``P``.  In these coordinates

* the volume is ``pi**n * n! * vol(P)``,
* ``d1(u0, u1)`` is the mean of ``|phi_u0 - phi_u1|`` over ``P``,
* the Monge-Ampere energy is ``I(u) = -mean(phi_u - phi_ref)``,
* ``J(u)`` lies within a fixed constant ``C`` of ``-inf phi_u`` when ``I(u) = 0``.

The constant ``C`` depends on the manifold and is never computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import polytope as pt
from .convex import ConvexFn, MaxAffine, as_max_affine, from_dict, to_dict
from .errors import NotNormalized, UnsupportedVariant
from .functionals import infimum_over_closure, mean_value
from .integration import _points_eval, _region_rows

C_NOTE = "J(u) lies in [center - C, center + C] for a constant C depending only on (X, omega); C is not computed"


def toric_volume(P, n=None):
    """``pi**n * n! * vol(P)``."""
    n = P.dim if n is None else n
    if n != P.dim:
        raise ValueError(f"dimension {n} does not match polytope dimension {P.dim}")
    return math.pi**n * math.factorial(n) * P.volume


def _zero(P):
    return MaxAffine(np.zeros((1, P.dim)), [0.0])


def _abs_difference_exact(f0, f1, P):
    """``int_P |f0 - f1|`` over the common refinement of the linearity regions."""
    m0, m1 = as_max_affine(f0), as_max_affine(f1)
    total = []
    for i in range(len(m0.intercepts)):
        r0, o0 = _region_rows(m0, i)
        for j in range(len(m1.intercepts)):
            r1, o1 = _region_rows(m1, j)
            s = m0.slopes[i] - m1.slopes[j]
            c = m0.intercepts[i] - m1.intercepts[j]
            A = np.vstack([P.A, r0, r1])
            b = np.concatenate([P.b, o0, o1])
            if not np.any(s):
                vol, _ = pt.hrep_moments(A, b, P.tol)
                total.append(vol * abs(c))
                continue
            for sign in (1.0, -1.0):
                # region where sign * (s.x + c) >= 0
                vol, cen = pt.hrep_moments(np.vstack([A, -sign * s]), np.append(b, sign * c), P.tol)
                if vol > 0:
                    total.append(vol * max(sign * (s @ cen + c), 0.0))
    return math.fsum(total)


def d1_toric(phi0, phi1, P, sample_count=200_000, seed=0):
    """``(1/vol P) * int_P |phi0 - phi1|``.

    Exact for piecewise-linear inputs; otherwise a seeded Monte Carlo mean.
    """
    try:
        return _abs_difference_exact(phi0, phi1, P) / P.volume
    except UnsupportedVariant:
        X = pt.sample_uniform(P, sample_count, np.random.default_rng(seed))
        return float(np.mean(np.abs(_points_eval(phi0, X) - _points_eval(phi1, X))))


def _mean(f, P, sample_count=200_000, seed=0):
    try:
        return mean_value(f, P)
    except UnsupportedVariant:
        X = pt.sample_uniform(P, sample_count, np.random.default_rng(seed))
        return float(np.mean(_points_eval(f, X)))


def ma_energy_toric(phi_u, phi_ref, P):
    """``I(u) = -(1/vol P) * int_P (phi_u - phi_ref)``; ``phi_ref=None`` means 0."""
    ref = 0.0 if phi_ref is None else _mean(phi_ref, P)
    return -(_mean(phi_u, P) - ref) + 0.0


def energy_normalize(phi_u, phi_ref, P):
    """Shift ``phi_u`` so that ``I(u) = 0`` (the shift also moves ``inf phi_u``)."""
    return phi_u.shifted(ma_energy_toric(phi_u, phi_ref, P))


def j_magnitude_bounds(phi_u, P, phi_ref=None, tol=1e-7):
    """``(-inf_P phi_u, note)``: the center of the two-sided bound on ``J(u)``.

    Raises :class:`NotNormalized` unless ``|I(u)| <= tol``.
    """
    energy = ma_energy_toric(phi_u, phi_ref, P)
    if abs(energy) > tol:
        raise NotNormalized(f"I(u) = {energy:.3g}; shift phi_u by I(u) first (see energy_normalize)")
    inf, _ = infimum_over_closure(phi_u, P)
    return -inf + 0.0, C_NOTE


@dataclass(frozen=True)
class ToricPotentialPair:
    """A moment polytope with a reference transform and the transform under study."""

    P: pt.Polytope
    phi_ref: ConvexFn
    phi_u: ConvexFn

    @classmethod
    def with_zero_reference(cls, P, phi_u):
        return cls(P, _zero(P), phi_u)

    def volume(self):
        return toric_volume(self.P)

    def energy(self):
        return ma_energy_toric(self.phi_u, self.phi_ref, self.P)

    def d1(self):
        """Distance from the reference potential."""
        return d1_toric(self.phi_ref, self.phi_u, self.P)

    def j_center(self, tol=1e-7):
        return j_magnitude_bounds(self.phi_u, self.P, self.phi_ref, tol)[0]

    def report(self):
        energy = self.energy()
        inf, _ = infimum_over_closure(self.phi_u, self.P)
        return {
            "dim": self.P.dim,
            "volume": self.volume(),
            "I": energy,
            "d1": self.d1(),
            "j_center": -inf if abs(energy) <= 1e-7 else None,
            "j_note": C_NOTE,
        }

    def to_dict(self):
        return {"polytope": self.P.to_dict(), "phi_ref": to_dict(self.phi_ref), "phi_u": to_dict(self.phi_u)}

    @classmethod
    def from_dict(cls, data):
        P = pt.Polytope.from_dict(data["polytope"])
        ref = from_dict(data["phi_ref"]) if data.get("phi_ref") else _zero(P)
        return cls(P, ref, from_dict(data["phi_u"]))
