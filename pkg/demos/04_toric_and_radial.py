"""From convex functions on a polytope to potentials and model rays.

Run:  python demos/04_toric_and_radial.py

On a toric manifold, potentials correspond to convex functions on the moment
polytope, and the distance d1 becomes an L1 distance.  The same c_n then
shows up as the best constant relating d1 and J.  The radial model rays hit
the reciprocal constant exactly, in rational arithmetic.
"""

from extremal_lab import polytope as pt
from extremal_lab.extremizers import build_gauge_extremizer
from extremal_lab.functionals import sharp_constant
from extremal_lab.radial import RadialRayModel, extremal_ratio, radial_report
from extremal_lab.toric import ToricPotentialPair

square = pt.unit_cube(2)
pair = ToricPotentialPair.with_zero_reference(square, build_gauge_extremizer(square, [0.5, 0.5]))
rep = pair.report()
print("P^1 x P^1 (moment polytope the unit square), extremal potential:")
print(f"  volume {rep['volume']:.6f} (= 2 pi^2)")
print(f"  energy I = {rep['I']:+.1e}, d1 = {rep['d1']:.6f}, J centre = {rep['j_center']:.3f}")
print(f"  d1 / J centre = {rep['d1'] / rep['j_center']:.6f} = c_2")
print(f"  ({rep['j_note']})")

print("\nModel rays (a, b) = (-1/n, 1):")
for n in range(1, 5):
    r = radial_report(RadialRayModel.canonical(n))
    print(f"  n={n}: I={r['I']:g}  J={r['J']:g}  d1={r['d1']:.6f}  J/d1={r['ratio']:.6f}  "
          f"(J/d1) * c_n = {extremal_ratio(n, exact=True) * sharp_constant(n, exact=True)}")

print("\nA ray that is not energy normalised, (a, b) = (0, 1), n=2:")
r = radial_report(RadialRayModel(0, 1, 2))
print(f"  I={r['I']:.6f}  J={r['J']:.6f}  d1={r['d1']:.6f}")
