"""Optimal search strategies for finding one target item in a finite population.

Seven model families (labeled ABCD, EF, GH, IKL, J, MN, OP by the
assumption combinations they serve) with exact means, exact inspection-count
distributions, a stochastic-dominance analysis across the models, and a
seeded Monte Carlo engine for validation.
"""

__version__ = "0.1.0"

from .distributions import (
    InspectionDistribution,
    dist_abcd,
    dist_ef,
    dist_gh,
    dist_ikl_exact,
    dist_j,
    dist_mn,
    dist_op_exact,
    thin_by_detection,
    write_distribution_csv,
)
from .montecarlo import (
    EmpiricalResult,
    SimConfig,
    dkw_band,
    dkw_check,
    sample_target_index,
    simulate,
    write_empirical_csv,
)
from .ordering import (
    ComparisonTruncationError,
    DominanceVerdict,
    OrderingReport,
    dominance_report,
    ef_op_incomparable_population,
    stochastic_compare,
)
from .population import (
    DecompositionError,
    InspectionWeights,
    Population,
    PopulationError,
    ProfileDecomposition,
    bayes_update,
    load_population,
    profile_to_weights,
    save_population_csv,
    solve_conditional_inspection,
    uniform_weights,
    validate_population,
)
from .strategies import (
    DefectiveSummary,
    EnumerationLimitError,
    OrderedPolicy,
    Schedule,
    ScheduleTruncationError,
    abcd_policy,
    ef_mean,
    ef_schedule,
    ef_swap_check,
    gh_summary,
    ikl_mean_exact,
    ikl_search_q,
    j_mean,
    j_optimal_q,
    mn_mean,
    mn_optimal_q,
    op_summary,
)

__all__ = [
    "__version__",
    "InspectionDistribution",
    "dist_abcd",
    "dist_ef",
    "dist_gh",
    "dist_ikl_exact",
    "dist_j",
    "dist_mn",
    "dist_op_exact",
    "thin_by_detection",
    "write_distribution_csv",
    "EmpiricalResult",
    "SimConfig",
    "dkw_band",
    "dkw_check",
    "sample_target_index",
    "simulate",
    "write_empirical_csv",
    "ComparisonTruncationError",
    "DominanceVerdict",
    "OrderingReport",
    "dominance_report",
    "ef_op_incomparable_population",
    "stochastic_compare",
    "DecompositionError",
    "InspectionWeights",
    "Population",
    "PopulationError",
    "ProfileDecomposition",
    "bayes_update",
    "load_population",
    "profile_to_weights",
    "save_population_csv",
    "solve_conditional_inspection",
    "uniform_weights",
    "validate_population",
    "DefectiveSummary",
    "EnumerationLimitError",
    "OrderedPolicy",
    "Schedule",
    "ScheduleTruncationError",
    "abcd_policy",
    "ef_mean",
    "ef_schedule",
    "ef_swap_check",
    "gh_summary",
    "ikl_mean_exact",
    "ikl_search_q",
    "j_mean",
    "j_optimal_q",
    "mn_mean",
    "mn_optimal_q",
    "op_summary",
]
