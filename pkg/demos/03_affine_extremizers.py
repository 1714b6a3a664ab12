"""Which polytopes admit an affine extremizer?

Run:  python demos/03_affine_extremizers.py

The extremizer with apex y is affine exactly when P is a cone at y cut by one
half-space.  A simplex is such a domain at each vertex; a square is not, at
any point.
"""

import numpy as np

from extremal_lab import polytope as pt
from extremal_lab.convex import GaugeExtremizer
from extremal_lab.extremizers import detect_affine_extremizer
from extremal_lab.functionals import ratio_report

tri = pt.standard_simplex(2)
dec = detect_affine_extremizer(tri)
print("2-simplex:")
print(f"  apex {dec.apex}, cut by {dec.halfspace_normal} . x < {dec.halfspace_offset:.4f}")
print(f"  affine extremizer slope {dec.extremizer().slopes[0]}, intercept {dec.extremizer().intercepts[0]:+.3f}")
print(f"  other candidate apexes: {[c.tolist() for c in dec.candidates[1:]]}")
X = pt.sample_uniform(tri, 5, np.random.default_rng(0))
print(f"  agreement with the gauge form: {np.max(np.abs(dec.extremizer()(X) - GaugeExtremizer(tri, dec.apex)(X))):.1e}")
print(f"  ratio {ratio_report(dec.extremizer(), tri).ratio:.6f}")

print(f"\nunit square: {detect_affine_extremizer(pt.unit_cube(2))}")

# A truncated cone: the triangle with one corner cut is no longer a cone + half-space.
clipped = pt.make_hrep([[-1, 0], [0, -1], [1, 1], [1, 0]], [0, 0, 1, 0.8])
print(f"clipped triangle: {detect_affine_extremizer(clipped)}")

# In 3D the simplex still qualifies, with slope (4/3)(1, 1, 1).
print(f"3-simplex slope: {detect_affine_extremizer(pt.standard_simplex(3)).defining_function.slope}")
