"""quantcalc: quantile-calculus toolkit.

Distributions are handled through their quantile functions; unit-interval
laws are built from Lorenz lifts and quantile spreads; expectation identities
of Taylor and mean-value type are verified numerically; stochastic orders and
aging classes are checked on grids; risk measures (VaR, mean-excess CVaR,
lower-tail AVaR, right spread) and their derived models round things out.
"""

from .distributions import (
    FamilySpec,
    QuantileModel,
    Support,
    block_piecewise,
    conditional_mean_between_quantiles,
    equilibrium_density,
    exponential,
    frechet_type,
    geo_max_exp,
    lomax,
    make_model,
    mean,
    mean_residual_life,
    pareto1,
    power_scale,
    power_unit,
    rayleigh,
    reversed_hazard,
    tabulated,
    tabulated_from_csv,
    uniform,
)
from .errors import (
    DomainError,
    EqualMeans,
    HypothesisFailed,
    InfiniteMean,
    InsufficientDerivatives,
    InvalidBracket,
    InvalidParameter,
    InvalidSampleSize,
    MissingDensity,
    NonConvergence,
    NonFiniteEvaluation,
    NonMonotonePhi,
    NotStochasticallyOrdered,
    QZero,
    QuantCalcError,
)
from .identities import (
    ApplicationPair,
    AvarPair,
    HatPair,
    IdentityReport,
    IfrPair,
    MvtCase,
    NbuPair,
    ProportionalCase,
    Risk1Pair,
    Risk2Pair,
    TaylorCase,
    TestFunction,
    constant,
    exp_function,
    log1p_function,
    monte_carlo_crosscheck,
    phi_from_model,
    polynomial,
    power_function,
    tail_power_phi,
    verify_application,
    verify_corollary_power,
    verify_mvt,
    verify_proportional,
    verify_taylor1,
    verify_taylor_n,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    IntegralResult,
    QuadratureSpec,
    erfc,
    find_root,
    integrate,
    log_integral,
    upper_incomplete_gamma,
)
from .orders import (
    ImplicationSuiteReport,
    OrderRelation,
    Status,
    Verdict,
    Witness,
    check_ifr,
    check_nbu,
    check_order,
    check_unit_order,
    check_xtau_decreasing,
    implication_suite,
)
from .risk import (
    DerivedModelKind,
    HatModel,
    ProportionalResidual,
    ResidualAtQuantile,
    RiskCurve,
    StarModel,
    avar,
    cvar,
    derive,
    frechet_avar,
    frechet_partial_mean,
    geo_max_exp_cvar,
    proportionality_check,
    rayleigh_cvar,
    right_spread,
    risk_curve,
    var,
)
from .unitlaw import (
    LorenzFixedPoint,
    MixtureCoefficient,
    UnitVariable,
    generalized_lorenz,
    lorenz_curve,
    lorenz_fixed_point,
    lorenz_lift,
    mixture_decomposition,
    sample,
    spread_lift,
    unit_expectation,
    unit_moment,
)

__version__ = "0.1.0"
