"""
weylwalk dyson - Brownian and random-matrix oracles for walks in W.
"""

from .constants import (
    IntegralMethod,
    chamber_gaussian_integral,
    constant_K,
    constant_kappa,
    gaussian_integral_vandermonde,
    mehta_integral,
    normalizer_delta_squared,
    normalizer_mu,
    reflection_rate_k2,
    vandermonde_gaussian_integral_closed,
)
from .dyson_sde import DysonBatch, dyson_drift_rows, simulate_dyson, simulate_dyson_batch
from .gue import gue_eigenvalues, gue_matrices, sample_gue_eigenvalues
from .karlin_mcgregor import (
    bm_survival_asymptotic,
    bm_survival_closed_k2,
    bm_survival_km,
    bm_transition_asymptotic,
    bm_transition_density_b,
    chapman_kolmogorov_k2,
)
from .limit_law import (
    LimitDensity,
    gap_cdf_k2,
    mean_gap_k2,
    mu_density,
    sample_delta_squared,
    sample_mu,
)

__all__ = [
    "IntegralMethod",
    "constant_K",
    "constant_kappa",
    "mehta_integral",
    "vandermonde_gaussian_integral_closed",
    "normalizer_mu",
    "normalizer_delta_squared",
    "reflection_rate_k2",
    "chamber_gaussian_integral",
    "gaussian_integral_vandermonde",
    "LimitDensity",
    "mu_density",
    "sample_mu",
    "sample_delta_squared",
    "gap_cdf_k2",
    "mean_gap_k2",
    "bm_transition_density_b",
    "bm_transition_asymptotic",
    "bm_survival_closed_k2",
    "bm_survival_asymptotic",
    "bm_survival_km",
    "chapman_kolmogorov_k2",
    "DysonBatch",
    "dyson_drift_rows",
    "simulate_dyson",
    "simulate_dyson_batch",
    "gue_matrices",
    "gue_eigenvalues",
    "sample_gue_eigenvalues",
]
