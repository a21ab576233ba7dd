"""
weylwalk lab - experiment driver, statistics and CLI.
"""

from .config import ConditionMode, ExperimentConfig, ExperimentKind, TailEstimator, build_config, dump_config, load_config
from .experiments import EXIT_ACCEPTANCE, EXIT_DEGENERATE, EXIT_ERROR, EXIT_OK, EXIT_USAGE, RunResult, run
from .settings import Settings
from .stats import (
    GofReport,
    TailFit,
    conjectured_exponent,
    fit_tail_exponent,
    gof_against_mu,
    light_tail_exponent,
)

__all__ = [
    "ExperimentKind",
    "TailEstimator",
    "ConditionMode",
    "ExperimentConfig",
    "build_config",
    "load_config",
    "dump_config",
    "Settings",
    "TailFit",
    "GofReport",
    "fit_tail_exponent",
    "light_tail_exponent",
    "conjectured_exponent",
    "gof_against_mu",
    "RunResult",
    "run",
    "EXIT_OK",
    "EXIT_ACCEPTANCE",
    "EXIT_DEGENERATE",
    "EXIT_ERROR",
    "EXIT_USAGE",
]
