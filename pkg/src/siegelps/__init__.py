"""Numerical toolkit for holomorphic discrete-series vectors on Sp(2n, R).

Evaluates lowest-weight vectors and their matrix coefficients, decides
non-vanishing of group averages over principal congruence subgroups, and
cross-checks inner-product identities at genus 1 by direct quadrature.
"""

from .errors import (
    AmbiguousThresholdError,
    BudgetError,
    ConvergenceError,
    DimensionError,
    DomainError,
    NumericalError,
    SamplingError,
    SiegelError,
    ZeroPolynomialError,
)
from .symplectic import (
    BoundedDomainPoint,
    KAKFactors,
    NAKFactors,
    SiegelPoint,
    SymplecticMatrix,
    UnitaryMatrix,
    act,
    cayley,
    cayley_inv,
    chi,
    diagonal_scaling,
    embed_unitary,
    hyperbolic,
    im_transform,
    j_factor,
    j_matrix,
    kak_decompose,
    nak_decompose,
    sp_check,
    sp_inverse,
    unitary_part,
    upper_translation,
)
from .polynomials import MatrixPolynomial, parse_polynomial
from .discrete_series import (
    MatrixCoefficientSpec,
    Weight,
    c_mn,
    f_kernel,
    f_mu_m,
    f_values,
    kernel_values,
    lift,
    lift_nak,
    matrix_coeff_kak,
    slash,
)
from .nonvanishing import (
    GeneralThreshold,
    IntegralResult,
    METHOD_CLOSED,
    METHOD_MC,
    METHOD_QUAD,
    SimplexRegion,
    ThresholdCell,
    ThresholdQuery,
    REFERENCE_N0,
    big_m,
    haar_unitary,
    integral_phi,
    n0_detl,
    n0_detl_report,
    n0_general,
    n0_table,
    phi_lm,
    vanishing_case,
    varphi_mu,
)
from .poincare import (
    CongruenceGroup,
    EnumerationBall,
    NormBoundsReport,
    TruncatedSeriesResult,
    enumerate_ball,
    kernel_series,
    load_ball,
    norm_bounds_check,
    poincare_f,
    poincare_F,
    save_ball,
    series_evaluator_genus1,
)
from .petersson import (
    DiscriminantForm,
    FundamentalDomainSpec,
    VerificationReport,
    mc_cmn,
    petersson,
    verify_cor62,
    verify_thm93,
)
from .matrixio import load_matrix, matrix_from_json, matrix_to_json, save_matrix

__version__ = "0.1.0"

__all__ = [
    "AmbiguousThresholdError",
    "BoundedDomainPoint",
    "BudgetError",
    "CongruenceGroup",
    "ConvergenceError",
    "DimensionError",
    "DiscriminantForm",
    "DomainError",
    "EnumerationBall",
    "FundamentalDomainSpec",
    "GeneralThreshold",
    "IntegralResult",
    "KAKFactors",
    "METHOD_CLOSED",
    "METHOD_MC",
    "METHOD_QUAD",
    "MatrixCoefficientSpec",
    "MatrixPolynomial",
    "NAKFactors",
    "NormBoundsReport",
    "NumericalError",
    "REFERENCE_N0",
    "SamplingError",
    "SiegelError",
    "SiegelPoint",
    "SimplexRegion",
    "SymplecticMatrix",
    "ThresholdCell",
    "ThresholdQuery",
    "TruncatedSeriesResult",
    "UnitaryMatrix",
    "VerificationReport",
    "Weight",
    "ZeroPolynomialError",
    "act",
    "big_m",
    "c_mn",
    "cayley",
    "cayley_inv",
    "chi",
    "diagonal_scaling",
    "embed_unitary",
    "enumerate_ball",
    "f_kernel",
    "f_mu_m",
    "f_values",
    "haar_unitary",
    "hyperbolic",
    "im_transform",
    "integral_phi",
    "j_factor",
    "j_matrix",
    "kak_decompose",
    "kernel_series",
    "kernel_values",
    "lift",
    "lift_nak",
    "load_ball",
    "load_matrix",
    "matrix_coeff_kak",
    "matrix_from_json",
    "matrix_to_json",
    "mc_cmn",
    "n0_detl",
    "n0_detl_report",
    "n0_general",
    "n0_table",
    "nak_decompose",
    "norm_bounds_check",
    "parse_polynomial",
    "petersson",
    "phi_lm",
    "poincare_F",
    "poincare_f",
    "save_ball",
    "save_matrix",
    "series_evaluator_genus1",
    "slash",
    "sp_check",
    "sp_inverse",
    "unitary_part",
    "upper_translation",
    "vanishing_case",
    "varphi_mu",
    "verify_cor62",
    "verify_thm93",
]
