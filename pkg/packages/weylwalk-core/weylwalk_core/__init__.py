"""
weylwalk core - chamber types, Vandermonde evaluation and estimates.
"""

from .chamber import (
    gap_coordinates_rows,
    in_weyl,
    in_weyl_eps,
    in_weyl_eps_rows,
    in_weyl_rows,
    perturbed_vandermonde,
    perturbed_vandermonde_rows,
    separation_threshold,
    vandermonde,
    vandermonde_rows,
    vandermonde_signed_log,
)
from .errors import (
    AcceptanceRateError,
    ArgumentError,
    BudgetError,
    DataError,
    DegenerateRunError,
    DimensionError,
    EnvelopeError,
    IntegrationError,
    WeylwalkError,
)
from .estimates import Estimate
from .types import PointLike, RawPoint, SignedLog, WeylPoint, as_coords

__all__ = [
    "RawPoint",
    "WeylPoint",
    "SignedLog",
    "PointLike",
    "as_coords",
    "Estimate",
    "vandermonde",
    "vandermonde_rows",
    "vandermonde_signed_log",
    "perturbed_vandermonde",
    "perturbed_vandermonde_rows",
    "in_weyl",
    "in_weyl_rows",
    "in_weyl_eps",
    "in_weyl_eps_rows",
    "separation_threshold",
    "gap_coordinates_rows",
    "WeylwalkError",
    "DimensionError",
    "ArgumentError",
    "DataError",
    "DegenerateRunError",
    "AcceptanceRateError",
    "BudgetError",
    "IntegrationError",
    "EnvelopeError",
]
