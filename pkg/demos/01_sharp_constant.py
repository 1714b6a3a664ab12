"""How small can mean|phi| be, relative to the depth of phi?

Run:  python demos/01_sharp_constant.py

For a mean-zero convex function on a polytope, the ratio mean|phi| / (-inf phi)
never drops below c_n.  This walk-through builds the functions that sit exactly
on that floor, looks at their sublevel sets, and then throws random convex
functions at the inequality.
"""

import numpy as np

from extremal_lab import polytope as pt
from extremal_lab.extremizers import build_gauge_extremizer, certify_extremizer
from extremal_lab.functionals import ratio_report, run_campaign, sharp_constant
from extremal_lab.integration import sublevel_volume

print("The floor c_n in low dimensions:")
for n in (1, 2, 3):
    print(f"  n={n}: c_n = {sharp_constant(n, exact=True)} = {sharp_constant(n):.6f}")

# The square with its centre as apex: the extremizer is a square pyramid.
square = pt.unit_cube(2)
phi = build_gauge_extremizer(square, [0.5, 0.5])
rep = ratio_report(phi, square)
print(f"\nSquare, apex at the centre: inf = {rep.infimum:+.3f}, mean|phi| = {rep.abs_mean:.6f}, ratio = {rep.ratio:.6f}")

# Its sublevel sets shrink towards the apex as a fixed power law.
print("\nvol{phi < a} against the prediction (2(a+1)/3)^2:")
for a in (-0.75, -0.5, 0.0, 0.25, 0.5):
    print(f"  a={a:+.2f}: {sublevel_volume(phi, square, a):.6f}  vs  {(2 * (a + 1) / 3) ** 2:.6f}")

# Moving the apex changes the function but not the ratio.
rng = np.random.default_rng(3)
P = pt.random_polytope(3, rng)
print(f"\nA random 3-polytope with {len(P.vertices)} vertices, five apexes:")
for _ in range(5):
    y = rng.dirichlet(np.ones(len(P.vertices))) @ P.vertices
    r = ratio_report(build_gauge_extremizer(P, y), P)
    print(f"  apex {np.round(y, 3)}: ratio - c_3 = {r.ratio - sharp_constant(3):+.2e}")

cert = certify_extremizer(build_gauge_extremizer(square, [0.2, 0.7]).to_max_affine(), square)
print(f"\nCertificate for an off-centre apex: valid={cert.valid}, "
      f"worst homothety residual {max(r for _, r in cert.homothety_residuals):.1e}")

print("\nRandom mean-zero max-affine functions never beat the floor:")
for n in (1, 2, 3):
    summary, _ = run_campaign(n, 200, seed=n)
    print(f"  n={n}: {summary['violations']} violations, min ratio / c_n = {summary['min_ratio'] / summary['c_n']:.4f}")
