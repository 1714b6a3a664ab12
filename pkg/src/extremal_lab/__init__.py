"""Sharp mean-to-infimum inequality for convex functions on polytopes.

For a mean-zero convex ``phi`` on an ``n``-dimensional convex polytope ``P``

    c_n * (-inf phi) <= mean_P |phi| <= 2 * (-inf phi),
    c_n = 2/(n+1) * (n/(n+1))**n.

The lower bound is attained exactly by the gauge extremizers, one per apex
in the closure of ``P``.  The upper bound is approached but never attained.
The package also covers the toric dictionary (volume, ``d1``, energy) and
the radial model rays on which the reciprocal constant is attained.
"""

from .convex import (
    AffinePiece,
    ConvexFn,
    GaugeExtremizer,
    Grid,
    MaxAffine,
    Shifted,
    check_convexity,
    evaluate,
    involution_residual,
    legendre_transform,
)
from .errors import *  # noqa: F401,F403
from .extremizers import (
    ConeHalfspaceDecomposition,
    ExtremizerCertificate,
    build_gauge_extremizer,
    certify_extremizer,
    detect_affine_extremizer,
    near_extremizer_family,
    recover_apex,
)
from .functionals import (
    FunctionalReport,
    infimum_over_closure,
    normalize_mean_zero,
    ratio_report,
    run_campaign,
    sharp_constant,
)
from .integration import (
    IntegralEstimate,
    integrate,
    integrate_bracketed,
    layer_cake_abs,
    monte_carlo_integral,
    sublevel_volume,
)
from .polytope import (
    Polytope,
    Simplex,
    contains,
    enumerate_vertices,
    gauge,
    homothety,
    make_hrep,
    triangulate,
    volume,
)
from .radial import (
    MassProfile,
    RadialRayModel,
    concavity_check,
    equality_rigidity_check,
    extremal_ratio,
    mass_profile,
    radial_d1,
    radial_j,
    radial_ma_energy,
)
from .toric import ToricPotentialPair, d1_toric, j_magnitude_bounds, ma_energy_toric, toric_volume

__version__ = "0.1.0"
