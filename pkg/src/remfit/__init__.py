"""remfit: relational event model fitting, diagnostics, and simulation."""

__version__ = "0.1.0"

from .diagnostics import (
    RESIDUAL_CUTOFF,
    AdequacyReport,
    RankMatch,
    adequacy_report,
    rank_coverage,
    rank_ecdf,
    guessing_equivalent,
    null_guessing_equivalent,
    null_residual,
    rank_and_match,
    scenario_waiting_time,
    surprise_events,
    surprise_flags,
    surprise_fraction,
)
from .effects import (
    EFFECT_NAMES,
    PSHIFT_LABELS,
    EffectSpecification,
    PrecomputedStatistics,
    SufficientState,
    build_statistics,
    classify_pshift,
    compute_statistics,
    effect_dimension,
    parameter_names,
    statistics_matrix,
    total_dimension,
    update_state,
)
from .errors import (
    BindingError,
    ComparabilityError,
    ConvergenceError,
    IdRangeError,
    MissingValueError,
    NumericalRangeError,
    OrderingError,
    ParameterError,
    RemError,
    ShapeError,
    SimultaneityError,
    SupportError,
    UnknownEffectError,
    UnsupportedFeature,
)
from .estimation import (
    ComparisonResult,
    FitOptions,
    FitResult,
    compare,
    fit,
    information_criteria,
    null_loglik,
    standard_errors,
)
from .history import (
    CovariateSet,
    Event,
    EventHistory,
    aggregate_sociomatrix,
    dyad_index,
    parse_edgelist,
    read_edgelist,
    read_edgelist_csv,
    read_edgelist_json,
    support_pairs,
    to_rows,
    validate_covariates,
    write_edgelist_csv,
)
from .likelihood import (
    LikelihoodResult,
    RateSnapshot,
    loglik,
    loglik_gradient,
    ordinal_loglik,
    rate_snapshot,
    temporal_loglik,
    value_and_gradient,
)
from .simulate import SimulationConfig, draw_next_event, make_rng, simulate_history

__all__ = [
    "__version__",
    "AdequacyReport",
    "BindingError",
    "ComparabilityError",
    "ComparisonResult",
    "ConvergenceError",
    "CovariateSet",
    "EFFECT_NAMES",
    "EffectSpecification",
    "Event",
    "EventHistory",
    "FitOptions",
    "FitResult",
    "IdRangeError",
    "LikelihoodResult",
    "MissingValueError",
    "NumericalRangeError",
    "OrderingError",
    "PSHIFT_LABELS",
    "ParameterError",
    "PrecomputedStatistics",
    "RankMatch",
    "RESIDUAL_CUTOFF",
    "rank_coverage",
    "rank_ecdf",
    "RateSnapshot",
    "RemError",
    "ShapeError",
    "SimulationConfig",
    "SimultaneityError",
    "SufficientState",
    "SupportError",
    "UnknownEffectError",
    "UnsupportedFeature",
    "adequacy_report",
    "aggregate_sociomatrix",
    "build_statistics",
    "classify_pshift",
    "compare",
    "compute_statistics",
    "draw_next_event",
    "dyad_index",
    "effect_dimension",
    "fit",
    "guessing_equivalent",
    "information_criteria",
    "loglik",
    "loglik_gradient",
    "make_rng",
    "null_guessing_equivalent",
    "null_loglik",
    "null_residual",
    "ordinal_loglik",
    "parameter_names",
    "parse_edgelist",
    "rank_and_match",
    "rate_snapshot",
    "read_edgelist",
    "read_edgelist_csv",
    "read_edgelist_json",
    "scenario_waiting_time",
    "simulate_history",
    "standard_errors",
    "statistics_matrix",
    "support_pairs",
    "surprise_events",
    "surprise_flags",
    "surprise_fraction",
    "temporal_loglik",
    "to_rows",
    "total_dimension",
    "update_state",
    "validate_covariates",
    "value_and_gradient",
    "write_edgelist_csv",
]
