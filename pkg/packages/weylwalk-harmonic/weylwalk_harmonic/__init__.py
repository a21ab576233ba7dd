"""
weylwalk harmonic - the invariant function V, its properties, V-tables
and conditioned-walk samplers.
"""

from .conditioned import (
    LawFit,
    SurvivalSample,
    chisquare_against_law,
    empirical_law,
    exact_htransform_chain_k2,
    exact_htransform_marginal_k2,
    exact_htransform_step_k2,
    htransform_kernel_k2,
    sample_conditioned_on_survival,
    total_variation,
)
from .hfunctions import ConstantH, DeltaH, HFunction, RowHFunction, evaluate_rows, is_flagged
from .invariant import (
    BiasNote,
    LatticeV,
    PathFront,
    VEstimate,
    VMethod,
    check_harmonicity,
    check_harmonicity_exact,
    estimate_v_limit,
    estimate_v_limit_curve,
    estimate_v_stopped,
    estimate_vT,
    estimate_vT_curve,
    exact_lattice_v,
    exact_v_estimate,
)
from .particles import (
    EnsembleReplicates,
    ParticleEnsemble,
    effective_sample_size,
    sample_conditioned_paths,
    sample_replicate_ensembles,
    systematic_resample,
)
from .properties import (
    PropertyCheck,
    all_passed,
    calibrate_bound_constant,
    check_asymptotic_ratio,
    check_bound,
    check_martingale_split,
    check_monotonicity,
    check_overshoot,
    check_positivity,
    check_vT_lower_bound,
    check_vT_submartingale,
    dominates,
    martingale_split,
    overshoot_ratio,
)
from .vtable import VTable, grid_points

__all__ = [
    "HFunction",
    "RowHFunction",
    "DeltaH",
    "ConstantH",
    "evaluate_rows",
    "is_flagged",
    "VMethod",
    "BiasNote",
    "VEstimate",
    "PathFront",
    "estimate_v_stopped",
    "estimate_v_limit",
    "estimate_v_limit_curve",
    "estimate_vT",
    "estimate_vT_curve",
    "exact_lattice_v",
    "exact_v_estimate",
    "LatticeV",
    "check_harmonicity",
    "check_harmonicity_exact",
    "VTable",
    "grid_points",
    "PropertyCheck",
    "dominates",
    "check_monotonicity",
    "calibrate_bound_constant",
    "check_bound",
    "check_asymptotic_ratio",
    "check_positivity",
    "check_vT_submartingale",
    "check_vT_lower_bound",
    "martingale_split",
    "check_martingale_split",
    "overshoot_ratio",
    "check_overshoot",
    "all_passed",
    "htransform_kernel_k2",
    "exact_htransform_step_k2",
    "exact_htransform_chain_k2",
    "exact_htransform_marginal_k2",
    "total_variation",
    "empirical_law",
    "LawFit",
    "chisquare_against_law",
    "SurvivalSample",
    "sample_conditioned_on_survival",
    "ParticleEnsemble",
    "effective_sample_size",
    "systematic_resample",
    "sample_conditioned_paths",
    "EnsembleReplicates",
    "sample_replicate_ensembles",
]
