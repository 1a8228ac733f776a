"""Distributional shift and comparison measures for discrete frequency
distributions, with feasible-set enumeration, sampling, and Monte Carlo
correlation experiments."""

from .distributions import (
    CumulativeDistribution,
    DistributionError,
    FrequencyDistribution,
    ParseError,
    ProbabilityVector,
    ValidationError,
    cumulate,
    decumulate,
    normalize,
    parse_distribution,
    parse_distributions,
)
from .experiments import (
    CorrelationTable,
    ExperimentConfig,
    RegressionSummary,
    UndefinedMeasureError,
    export_fork_data,
    fit_through_origin,
    ols_fit,
    run_experiment,
    sample_poisson_distribution,
)
from .feasible import (
    CapExceededError,
    CollisionRecord,
    FeasibleSetSpec,
    UniquenessReport,
    audit_uniqueness,
    audit_uniqueness_default,
    cardinality,
    enumerate_members,
    sample_uniform,
)
from .measures import (
    MEASURE_NAMES,
    MeasureReport,
    chi_square_distance,
    compare_all,
    emd,
    histogram_non_intersection,
    kl_divergence,
    ks_distance,
    rps,
)
from .shift import (
    ShiftExponent,
    ShiftMode,
    ShiftValue,
    ds,
    ds_linear,
    ds_with_exponent,
    rds,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "CollisionRecord",
    "CorrelationTable",
    "CumulativeDistribution",
    "DistributionError",
    "ExperimentConfig",
    "FeasibleSetSpec",
    "FrequencyDistribution",
    "MEASURE_NAMES",
    "MeasureReport",
    "ParseError",
    "ProbabilityVector",
    "RegressionSummary",
    "ShiftExponent",
    "ShiftMode",
    "ShiftValue",
    "UndefinedMeasureError",
    "UniquenessReport",
    "ValidationError",
    "audit_uniqueness",
    "audit_uniqueness_default",
    "cardinality",
    "chi_square_distance",
    "compare_all",
    "cumulate",
    "decumulate",
    "ds",
    "ds_linear",
    "ds_with_exponent",
    "emd",
    "enumerate_members",
    "export_fork_data",
    "fit_through_origin",
    "histogram_non_intersection",
    "kl_divergence",
    "ks_distance",
    "normalize",
    "ols_fit",
    "parse_distribution",
    "parse_distributions",
    "rds",
    "rps",
    "run_experiment",
    "sample_poisson_distribution",
    "sample_uniform",
]
