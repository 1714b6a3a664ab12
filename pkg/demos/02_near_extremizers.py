"""The upper bound 2 is approached but never reached.

Run:  python demos/02_near_extremizers.py

A convex function that is flat on most of the polytope and rises steeply in a
thin collar near the boundary has almost all of its |phi| mass coming from the
flat part after mean-zero normalisation.  As the collar thins the ratio climbs
towards 2.
"""

from extremal_lab import polytope as pt
from extremal_lab.extremizers import near_extremizer_family
from extremal_lab.functionals import ratio_report

interval = pt.unit_cube(1)
print("Interval (0, 1), collar at the right end:")
print("  eps        ratio        2 - ratio")
for eps in (0.3, 0.1, 0.03, 0.01, 0.001):
    r = ratio_report(near_extremizer_family(interval, [0.0], eps), interval)
    print(f"  {eps:<9}  {r.ratio:.7f}  {2 - r.ratio:.2e}")

# On the interval the gap has a closed form; the engine reproduces it.
for eps in (0.1, 0.01):
    r = ratio_report(near_extremizer_family(interval, [0.0], eps), interval).ratio
    print(f"  eps={eps}: 2 - 2 eps + eps^2/2 = {2 - 2 * eps + eps**2 / 2:.12f}, computed {r:.12f}")

square = pt.unit_cube(2)
print("\nThe square behaves the same way:")
for eps in (0.1, 0.01, 0.001):
    r = ratio_report(near_extremizer_family(square, [0.5, 0.5], eps), square)
    print(f"  eps={eps:<6} ratio {r.ratio:.6f}")
