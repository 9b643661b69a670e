"""Pole estimation for damped-exponential signals.

The package covers the full workflow: modeling transient signals as sums
of complex exponentials, reconstructing nonuniformly sampled records onto
uniform grids through discrete orthogonal polynomials, estimating the
complex poles by SVD-based linear prediction (error-whitened MLE,
autocorrelation-matrix, and matrix-pencil variants), and benchmarking the
estimators by Monte Carlo bias and variance.
"""

from .bench import (
    MethodSpec,
    NonuniformSampling,
    ReconstructionSettings,
    Scenario,
    StatReport,
    StatRow,
    UniformSampling,
    emit_report,
    match_poles,
    parse_report_csv,
    run_scenario,
    schedule_times,
)
from .config import Config, load_config
from .estimators import (
    AutocorrelationMethod,
    EstimateResult,
    MatrixPencil,
    PolynomialTransformMLE,
    correct_singular_values,
    estimate_alm,
    estimate_mp,
    estimate_pt_mle,
    fit_residues,
    separate_signal_poles,
    solve_oracle_mle,
)
from .exceptions import (
    ConfigError,
    DegeneracyError,
    EstimationError,
    ExtrapolationError,
    InvalidInputError,
    PolyidentError,
    RankDeficiencyError,
    RankError,
    SingularityError,
    WeightingError,
)
from .linalg import (
    SvdFactors,
    companion_roots,
    rank_m_pseudoinverse,
    svd,
    toeplitz_hermitian,
)
from .orthopoly import (
    PolyBasis,
    PolynomialReconstructor,
    ReconstructionResult,
    ReconstructionTransform,
    build_basis,
    build_transform,
    evaluate_basis,
    exact_error_covariance,
    fit_coefficients,
    propagate_autocorr,
    reconstruct,
    reconstruct_auto,
    select_order,
)
from .signals import (
    NOISELESS,
    NoiseModel,
    Pole,
    SampleSet,
    SignalSpec,
    add_noise,
    generate_signal,
    make_nonuniform_schedule,
    s_to_z,
    snr_db_of,
    z_to_s,
)

__version__ = "0.1.0"

__all__ = [
    "AutocorrelationMethod",
    "Config",
    "ConfigError",
    "DegeneracyError",
    "EstimateResult",
    "EstimationError",
    "ExtrapolationError",
    "InvalidInputError",
    "MatrixPencil",
    "MethodSpec",
    "NOISELESS",
    "NoiseModel",
    "NonuniformSampling",
    "PolyBasis",
    "PolyidentError",
    "PolynomialReconstructor",
    "PolynomialTransformMLE",
    "Pole",
    "RankDeficiencyError",
    "RankError",
    "ReconstructionResult",
    "ReconstructionSettings",
    "ReconstructionTransform",
    "SampleSet",
    "Scenario",
    "SignalSpec",
    "SingularityError",
    "StatReport",
    "StatRow",
    "SvdFactors",
    "UniformSampling",
    "WeightingError",
    "add_noise",
    "build_basis",
    "build_transform",
    "companion_roots",
    "correct_singular_values",
    "emit_report",
    "estimate_alm",
    "estimate_mp",
    "estimate_pt_mle",
    "evaluate_basis",
    "exact_error_covariance",
    "fit_coefficients",
    "fit_residues",
    "generate_signal",
    "load_config",
    "make_nonuniform_schedule",
    "match_poles",
    "parse_report_csv",
    "propagate_autocorr",
    "rank_m_pseudoinverse",
    "reconstruct",
    "reconstruct_auto",
    "run_scenario",
    "s_to_z",
    "schedule_times",
    "select_order",
    "separate_signal_poles",
    "snr_db_of",
    "solve_oracle_mle",
    "svd",
    "toeplitz_hermitian",
    "z_to_s",
]
