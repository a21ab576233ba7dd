"""
weylwalk walks - step laws, random streams, path simulation and survival.
"""

from .lattice import (
    LatticeDistribution,
    alive_distribution,
    delta_of_gaps,
    exact_exit_expectation,
    exact_expectation_on_survival,
    exact_one_step_defect,
    exact_survival_curve,
    exact_survival_probability,
    gap_moves,
    lattice_gaps,
)
from .laws import (
    MomentReport,
    StepKind,
    StepLaw,
    empirical_tail_slope,
    moment_self_test,
    parse_law,
    sample_step,
    tail_exceedance,
)
from .paths import (
    DEFAULT_EPS,
    StoppingBatch,
    StoppingRecord,
    StopRule,
    exit_times,
    simulate_batch,
    simulate_until,
    trace_path,
)
from .rng import RngStream
from .runner import DEFAULT_BLOCK_SIZE, block_ranges, compensated_sum, map_blocks
from .survival import (
    SplittingRun,
    dyadic_levels,
    run_splitting,
    survival_curve_direct,
    survival_curve_splitting,
    survival_prob_direct,
    survival_prob_splitting,
)

__all__ = [
    "StepKind",
    "StepLaw",
    "parse_law",
    "sample_step",
    "MomentReport",
    "moment_self_test",
    "tail_exceedance",
    "empirical_tail_slope",
    "RngStream",
    "DEFAULT_BLOCK_SIZE",
    "block_ranges",
    "map_blocks",
    "compensated_sum",
    "DEFAULT_EPS",
    "StoppingRecord",
    "StoppingBatch",
    "StopRule",
    "trace_path",
    "simulate_until",
    "simulate_batch",
    "exit_times",
    "SplittingRun",
    "dyadic_levels",
    "run_splitting",
    "survival_prob_direct",
    "survival_curve_direct",
    "survival_prob_splitting",
    "survival_curve_splitting",
    "LatticeDistribution",
    "alive_distribution",
    "gap_moves",
    "lattice_gaps",
    "delta_of_gaps",
    "exact_survival_probability",
    "exact_survival_curve",
    "exact_expectation_on_survival",
    "exact_exit_expectation",
    "exact_one_step_defect",
]
