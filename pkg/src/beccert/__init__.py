"""beccert: certified numerical upper bounds for the Berry-Esseen constant.

Exact arithmetic on discrete distributions and their zero-bias transforms,
characteristic-function majorants with Dawson closed forms, the Prawitz
smoothing-inequality evaluation D*(eps, U0, U), and bridged epsilon scans
that assemble machine-checkable certificates for the constants 0.5606
(independent summands) and 0.4785 (identically distributed summands).
"""

from ._backend import BACKEND
from .bounds import (
    CONSTANTS,
    BoundConstants,
    IidContext,
    b,
    branch_point_A,
    dawson,
    delta_hat1,
    delta_hat2,
    delta_hat3,
    delta_hat4,
    f_hat1,
    f_hat2,
    f_hat3,
    n_zero,
    small_eps_bound_general,
    small_eps_bound_iid,
)
from .certify import (
    Certificate,
    CertificationError,
    OptResult,
    ScanEntry,
    certified_scan_general,
    certified_scan_iid,
    optimize_params,
    stitch_regimes,
)
from .dist import (
    DiscreteDistribution,
    DistributionError,
    MomentSummary,
    cf,
    convolve,
    convolve_many,
    kolmogorov_vs_normal,
    moments,
    normal_cdf,
    standardize,
    zero_bias_cf,
)
from .prawitz import (
    BoundMode,
    General,
    IidFinite,
    IidTail,
    PrawitzParams,
    PrawitzResult,
    integral3_integrand,
    integral4,
    kernel_K,
    prawitz_rhs,
)
from .quadrature import CumulativeQuad, QuadratureError, QuadResult, adaptive_quad
from .zero_bias import (
    InfeasibleThreePointError,
    PiecewiseConstantDensity,
    PiecewiseLinearCdf,
    StepCdf,
    ThreePointParams,
    kappa1,
    mixture_zero_bias_sum,
    pl_sup_distance,
    theorem3_gap,
    threepoint_case,
    threepoint_distribution,
    threepoint_g,
    threepoint_grid,
    threepoint_params,
    two_point,
    zero_bias_cdf,
    zero_bias_density,
    zeta3_ratio_lower,
)

__version__ = "0.1.0"
