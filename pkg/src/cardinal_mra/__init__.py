"""Cardinal interpolation and multiresolution analysis from radial basis functions.

Fundamental (Lagrange) functions and orthonormal scaling functions for
polyharmonic, generalized multiquadric and Gaussian kernels, built from
lattice sums of their Fourier symbols, together with numerical checks of the
conditions that make their translate spaces a multiresolution analysis.
"""

from .errors import CardinalMRAError, ConvergenceError, DomainError, ToleranceUnreachable
from .families import (
    AXES,
    CardinalInterpolator,
    FamilyPath,
    Gaussian,
    GeneralizedMultiquadric,
    Polyharmonic,
    decay_envelope,
    from_dict,
    from_json,
    log_symbol,
    m_bound,
    m_ratio,
    symbol,
)
from .periodization import (
    PeriodizedValue,
    SymbolGrid,
    fundamental_symbol,
    limit_radius,
    periodize,
    riesz_ratio,
    riesz_upper_constant,
    sample_grid,
    scaling_symbol,
    symbol_values,
)
from .specfun import BesselEvalConfig, bessel_k, bessel_k_log
from .synthesis import (
    CoefficientSequence,
    GramMatrix,
    SampledFunction,
    basis_change_L_to_Phi,
    basis_change_Phi_to_L,
    cardinal_interpolant,
    gram_matrix,
    refinement_mask_probe,
    synthesize,
)
from .verify import (
    MRAReport,
    ReportConfig,
    check_density_criterion,
    check_h2,
    check_r1,
    check_r2,
    check_symbol_limit,
    full_report,
)

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "BesselEvalConfig",
    "CardinalInterpolator",
    "CardinalMRAError",
    "CoefficientSequence",
    "ConvergenceError",
    "DomainError",
    "FamilyPath",
    "Gaussian",
    "GeneralizedMultiquadric",
    "GramMatrix",
    "MRAReport",
    "PeriodizedValue",
    "Polyharmonic",
    "ReportConfig",
    "SampledFunction",
    "SymbolGrid",
    "ToleranceUnreachable",
    "basis_change_L_to_Phi",
    "basis_change_Phi_to_L",
    "bessel_k",
    "bessel_k_log",
    "cardinal_interpolant",
    "check_density_criterion",
    "check_h2",
    "check_r1",
    "check_r2",
    "check_symbol_limit",
    "decay_envelope",
    "from_dict",
    "from_json",
    "full_report",
    "fundamental_symbol",
    "gram_matrix",
    "limit_radius",
    "log_symbol",
    "m_bound",
    "m_ratio",
    "periodize",
    "refinement_mask_probe",
    "riesz_ratio",
    "riesz_upper_constant",
    "sample_grid",
    "scaling_symbol",
    "symbol",
    "symbol_values",
    "synthesize",
]
