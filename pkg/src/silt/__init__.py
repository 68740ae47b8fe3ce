"""Self-intersection local times of lattice walks: exact moments, variance
asymptotics, generating-function coefficient bounds, renewal counts, and the
quenched normality of random-scenery sums.
"""
from .errors import BudgetError, LawError
from .laws import (
    StepLaw,
    aperiodicity_witness,
    gamma_from_charfn,
    make_law,
    truncated_zipf_pmf,
)
from .paths import (
    WalkPath,
    cross_intersections,
    max_local_time,
    occupation,
    self_intersections,
    simulate_path,
    site_keys,
    vn_profile,
)
from .moments import (
    LatticePmf,
    VarianceDecomposition,
    convolution_powers,
    expected_vn,
    growth_check,
    variance_components,
    variance_enumeration,
    variance_exact,
    weighted_power_kernel,
)
from .contour import (
    BUILTIN_SERIES_NAMES,
    BoundTerm,
    CoefficientEstimate,
    DarbouxHypothesis,
    LogFactor,
    RenewalLaw,
    SeriesSpec,
    builtin_series,
    cauchy_coefficient,
    coefficient_bound,
    darboux_constant,
    deviation_bound_check,
    extract_to_tolerance,
    extraction_radius,
    fit_hypothesis,
    renewal_coeff_check,
    renewal_gf,
    renewal_lln_check,
    renewal_moment_profile,
    renewal_moments_exact,
    renewal_series,
    verify_darboux,
)
from .quad import (
    QuadratureResult,
    corner_integrand,
    identity_suite,
    kappa_qmc,
    kappa_quadrature,
    load_kappa_fixture,
    proof_integral_1d_a3,
    proof_integral_2d,
    proof_integrals_1d_a2,
    variance_limit_constant,
)
from .mc import (
    McSummary,
    expectation_trend,
    mc_moments,
    replicate_intersections,
    summarize_values,
    variance_trend,
    vn_concentration,
)
from .rwrs import (
    SCENERY_KINDS,
    RwrsPath,
    Scenery,
    fdd_covariance_check,
    make_scenery,
    quenched_clt_test,
    quenched_covariance,
    quenched_variance,
    rwrs_path,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BudgetError",
    "LawError",
    "StepLaw",
    "aperiodicity_witness",
    "gamma_from_charfn",
    "make_law",
    "truncated_zipf_pmf",
    "WalkPath",
    "cross_intersections",
    "max_local_time",
    "occupation",
    "self_intersections",
    "simulate_path",
    "site_keys",
    "vn_profile",
    "LatticePmf",
    "VarianceDecomposition",
    "convolution_powers",
    "expected_vn",
    "growth_check",
    "variance_components",
    "variance_enumeration",
    "variance_exact",
    "weighted_power_kernel",
    "BUILTIN_SERIES_NAMES",
    "BoundTerm",
    "CoefficientEstimate",
    "DarbouxHypothesis",
    "LogFactor",
    "RenewalLaw",
    "SeriesSpec",
    "builtin_series",
    "cauchy_coefficient",
    "coefficient_bound",
    "darboux_constant",
    "deviation_bound_check",
    "extract_to_tolerance",
    "extraction_radius",
    "fit_hypothesis",
    "renewal_coeff_check",
    "renewal_gf",
    "renewal_lln_check",
    "renewal_moment_profile",
    "renewal_moments_exact",
    "renewal_series",
    "verify_darboux",
    "QuadratureResult",
    "corner_integrand",
    "identity_suite",
    "kappa_qmc",
    "kappa_quadrature",
    "load_kappa_fixture",
    "proof_integral_1d_a3",
    "proof_integral_2d",
    "proof_integrals_1d_a2",
    "variance_limit_constant",
    "McSummary",
    "expectation_trend",
    "mc_moments",
    "replicate_intersections",
    "summarize_values",
    "variance_trend",
    "vn_concentration",
    "SCENERY_KINDS",
    "RwrsPath",
    "Scenery",
    "fdd_covariance_check",
    "make_scenery",
    "quenched_clt_test",
    "quenched_covariance",
    "quenched_variance",
    "rwrs_path",
]
