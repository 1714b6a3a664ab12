"""``extremal-lab`` command-line driver.

Exit status: 0 on success, 2 when a bound is violated or a certificate
fails, 1 on input or validation errors.  Set ``EXTREMAL_LAB_THREADS`` to
run campaign trials on a thread pool.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import polytope as pt
from .convex import from_dict
from .errors import ExtremalLabError
from .extremizers import build_gauge_extremizer, certify_extremizer, detect_affine_extremizer, near_extremizer_family, n_scale
from .functionals import ratio_report, run_campaign, sharp_constant
from .integration import sublevel_volume
from .radial import RadialRayModel, extremal_ratio, radial_report
from .reports import dumps, to_csv
from .toric import ToricPotentialPair

COMMANDS = ("verify", "extremize", "certify", "detect-affine", "near-extremal", "toric", "radial")


@dataclass
class CampaignConfig:
    command: str
    dim: int = 2
    trials: int = 100
    seed: int = 0
    tol: float = 1e-7
    polytope: str | None = None
    function: str | None = None
    reference: str | None = None
    apex: str | None = None
    epsilon: str = "0.1,0.01,0.001"
    a: str | None = None
    b: str | None = None
    levels: str | None = None
    out: str | None = None
    csv: str | None = None
    threads: int = field(default_factory=lambda: int(os.environ.get("EXTREMAL_LAB_THREADS", "1") or 1))

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.trials < 1:
            raise ValueError("--trials must be at least 1")
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.threads < 1:
            raise ValueError("EXTREMAL_LAB_THREADS must be a positive integer")


class _Failure(Exception):
    """A report that must exit with status 2."""

    def __init__(self, report):
        self.report = report


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def load_polytope(source, dim):
    """A JSON file path, or one of ``cube``, ``simplex``, ``interval``."""
    if source is None or source == "cube":
        return pt.unit_cube(dim)
    if source == "simplex":
        return pt.standard_simplex(dim)
    if source == "interval":
        return pt.unit_cube(1)
    try:
        return pt.Polytope.load(source)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: not valid JSON ({exc})") from exc


def load_function(path):
    try:
        return from_dict(json.loads(Path(path).read_text()))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: malformed function payload ({exc!r})") from exc


def _apex(cfg, P):
    if cfg.apex is None:
        return np.mean(P.vertices, axis=0)
    y = np.array(_floats(cfg.apex))
    if y.shape != (P.dim,):
        raise ValueError(f"--apex needs {P.dim} coordinates")
    return y


def run_verify(cfg):
    if cfg.function is not None:
        P = load_polytope(cfg.polytope, cfg.dim)
        reports = [ratio_report(load_function(cfg.function), P, tol=cfg.tol)]
        ratios = [r.ratio for r in reports]
        summary = {"trials": 1, "violations": int(reports[0].verdict != "within_bounds"),
                   "min_ratio": min(ratios), "max_ratio": max(ratios), "c_n": sharp_constant(P.dim)}
    else:
        if cfg.dim > 3 and cfg.polytope is None:
            raise ValueError("random polytopes are limited to --dim <= 3")
        P = load_polytope(cfg.polytope, cfg.dim) if cfg.polytope else None
        n = P.dim if P is not None else cfg.dim
        summary, reports = run_campaign(n, cfg.trials, cfg.seed, polytope=P, threads=cfg.threads)
    out = {"command": "verify", "seed": cfg.seed, "summary": summary, "reports": [r.to_dict() for r in reports]}
    if cfg.csv:
        Path(cfg.csv).write_text(to_csv(["trial", "ratio", "infimum", "abs_mean", "verdict"],
                                        [(i, r.ratio, r.infimum, r.abs_mean, r.verdict) for i, r in enumerate(reports)]))
    if summary["violations"]:
        raise _Failure(out)
    return out


def _profile_csv(f, P, levels):
    n, vol = P.dim, P.volume
    rows = [(a, sublevel_volume(f, P, a) / vol, n_scale(n, a) ** n) for a in levels]
    return to_csv(["a", "sublevel_fraction", "power_law"], rows)


def run_extremize(cfg):
    P = load_polytope(cfg.polytope, cfg.dim)
    y = _apex(cfg, P)
    f = build_gauge_extremizer(P, y)
    levels = _floats(cfg.levels) if cfg.levels else None
    cert = certify_extremizer(f.to_max_affine(), P, levels, seed=cfg.seed)
    dec = detect_affine_extremizer(P)
    affine = dec is not None and any(np.allclose(c, y, atol=1e-9) for c in dec.candidates)
    out = {"command": "extremize", "certificate": cert.to_dict(), "ratio": ratio_report(f, P).ratio,
           "c_n": sharp_constant(P.dim), "affine": affine}
    if cfg.csv:
        grid = np.linspace(-1.0, 1.0 / P.dim, 41)[1:]
        Path(cfg.csv).write_text(_profile_csv(f, P, grid))
    if not cert.valid:
        raise _Failure(out)
    return out


def run_certify(cfg):
    if cfg.function is None:
        raise ValueError("certify needs --function")
    f = load_function(cfg.function)
    P = load_polytope(cfg.polytope, f.dim)
    levels = _floats(cfg.levels) if cfg.levels else None
    cert = certify_extremizer(f, P, levels, seed=cfg.seed)
    out = {"command": "certify", "certificate": cert.to_dict()}
    if not cert.valid:
        raise _Failure(out)
    return out


def run_detect_affine(cfg):
    P = load_polytope(cfg.polytope, cfg.dim)
    dec = detect_affine_extremizer(P)
    return {"command": "detect-affine", "decomposition": None if dec is None else dec.to_dict()}


def run_near_extremal(cfg):
    P = load_polytope(cfg.polytope, cfg.dim)
    y = _apex(cfg, P)
    rows = []
    for eps in _floats(cfg.epsilon):
        r = ratio_report(near_extremizer_family(P, y, eps), P, tol=cfg.tol)
        rows.append({"epsilon": eps, "ratio": r.ratio, "infimum": r.infimum, "verdict": r.verdict})
    out = {"command": "near-extremal", "upper": 2.0, "family": rows}
    if cfg.csv:
        Path(cfg.csv).write_text(to_csv(["epsilon", "ratio"], [(r["epsilon"], r["ratio"]) for r in rows]))
    if any(r["verdict"] != "within_bounds" for r in rows):
        raise _Failure(out)
    return out


def run_toric(cfg):
    if cfg.function is None:
        raise ValueError("toric needs --function")
    phi_u = load_function(cfg.function)
    P = load_polytope(cfg.polytope, phi_u.dim)
    pair = (ToricPotentialPair(P, load_function(cfg.reference), phi_u) if cfg.reference
            else ToricPotentialPair.with_zero_reference(P, phi_u))
    return {"command": "toric", **pair.report()}


def run_radial(cfg):
    n = cfg.dim
    if n < 1:
        raise ValueError("--dim must be positive")
    canon = RadialRayModel.canonical(n)
    a = Fraction(cfg.a) if cfg.a is not None else canon.tau_minus
    b = Fraction(cfg.b) if cfg.b is not None else canon.tau_plus
    rep = radial_report(RadialRayModel(a, b, n))
    product = extremal_ratio(n, exact=True) * sharp_constant(n, exact=True)
    if product != 1:
        raise _Failure({"command": "radial", **rep})
    return {"command": "radial", **rep, "ratio_times_c_n": float(product)}


RUNNERS = {
    "verify": run_verify,
    "extremize": run_extremize,
    "certify": run_certify,
    "detect-affine": run_detect_affine,
    "near-extremal": run_near_extremal,
    "toric": run_toric,
    "radial": run_radial,
}


def build_parser():
    p = argparse.ArgumentParser(prog="extremal-lab", description="Check, construct and certify extremizers of the mean-to-infimum inequality.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--dim", type=int, default=2)
        s.add_argument("--trials", type=int, default=100)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--tol", type=float, default=1e-7)
        s.add_argument("--polytope", help="JSON file, or cube | simplex | interval")
        s.add_argument("--function", help="JSON convex function payload")
        s.add_argument("--reference", help="JSON reference transform (toric)")
        s.add_argument("--apex", help="comma-separated coordinates")
        s.add_argument("--epsilon", default="0.1,0.01,0.001", help="comma-separated values")
        s.add_argument("--a", help="tau_minus (radial); fractions like -1/3 accepted")
        s.add_argument("--b", help="tau_plus (radial)")
        s.add_argument("--levels", help="comma-separated levels in (-1, 1/n]")
        s.add_argument("--out", help="write JSON here instead of stdout")
        s.add_argument("--csv", help="write a plot-ready CSV here")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    status = 0
    try:
        cfg = CampaignConfig(**vars(args))
        report = RUNNERS[cfg.command](cfg)
    except _Failure as fail:
        report, status = fail.report, 2
    except (ExtremalLabError, ValueError, OSError) as exc:
        print(f"extremal-lab: error: {exc}", file=sys.stderr)
        return 1
    text = dumps(report)
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"extremal-lab: error: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
