"""Spectrahedral relaxations of rigidly convex sets and hyperbolicity cones.

Exact rational arithmetic is used wherever inputs are rational; floating
point appears only in eigenvalue, root and gauge computations.
"""

from .amalgam import (
    AmalgamProblem,
    additive_convolution_1d,
    amalgamate_deg2_onevar,
    amalgamate_disjoint,
    amalgamate_quadratic,
)
from .detrep import (
    circle_pencil,
    hv2_quadratic,
    lincofactor_rep,
    perfect_family,
    saunderson_pencil,
)
from .errors import (
    NotPSDError,
    NotRealZeroError,
    NumericalError,
    PreconditionError,
    RZError,
    UsageError,
)
from .geometry import (
    cone_member,
    member_C,
    member_S,
    quadratic_rz_certificate,
    ray_gauge_C,
    ray_gauge_S,
    real_zero_probe,
    trace_dir,
)
from .linalg import PSDVerdict, is_psd, monic_normalize
from .moments import (
    DetRep,
    MomentTable,
    detrep_expand,
    detrep_moment,
    dirac_moments,
    hurwitz_product,
    moment_table,
)
from .pencil import (
    HalfSpace,
    HomogeneousPencil,
    Pencil,
    build_hierarchy_pencil,
    build_pencil,
    halfspace,
    homogeneous_pencil,
    shifted_pencil_family,
)
from .poly import Polynomial, exp_series, log_series, parse_polynomial, poly

__version__ = "0.1.0"
