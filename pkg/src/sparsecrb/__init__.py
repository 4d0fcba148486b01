"""Constrained Cramer-Rao bounds and estimator benchmarks for sparse
linear-Gaussian models."""

from .bounds import (
    BiasSpec,
    BoundResult,
    FeasibleBasis,
    SupportRegime,
    coherence_sandwich,
    crb_general,
    crb_signal,
    crb_sparse_vector,
    efficient_estimate,
    feasible_basis,
    fisher_information,
    unbiased_estimator_exists,
)
from .estimators import (
    EstimateRecord,
    SolverConfig,
    bpdn,
    dantzig,
    gauss_bpdn,
    gds,
    ls,
    ml,
    oracle,
    soft_threshold,
)
from .linalg import (
    RankTolerance,
    is_psd,
    orthonormal_range_basis,
    projector_onto_columns,
    pseudoinverse,
    range_inclusion,
)
from .model import (
    ProblemInstance,
    SignalModel,
    SparkValue,
    coherence,
    generate_dictionary,
    generate_sparse_param,
    identifiable,
    simulate_measurements,
    spark,
)
from .simulation import (
    SweepReport,
    TrialPlan,
    default_regularization,
    estimate_mse,
    sweep_snr,
    sweep_sparsity,
)

__version__ = "0.1.0"

__all__ = [
    "BiasSpec", "BoundResult", "FeasibleBasis", "SupportRegime",
    "coherence_sandwich", "crb_general", "crb_signal", "crb_sparse_vector",
    "efficient_estimate", "feasible_basis", "fisher_information",
    "unbiased_estimator_exists",
    "EstimateRecord", "SolverConfig", "bpdn", "dantzig", "gauss_bpdn", "gds",
    "ls", "ml", "oracle", "soft_threshold",
    "RankTolerance", "is_psd", "orthonormal_range_basis",
    "projector_onto_columns", "pseudoinverse", "range_inclusion",
    "ProblemInstance", "SignalModel", "SparkValue", "coherence",
    "generate_dictionary", "generate_sparse_param", "identifiable",
    "simulate_measurements", "spark",
    "SweepReport", "TrialPlan", "default_regularization", "estimate_mse",
    "sweep_snr", "sweep_sparsity",
]
