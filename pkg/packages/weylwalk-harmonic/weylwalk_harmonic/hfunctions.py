"""
h-functions: positive functions on W used as Doob-transform weights.
"""

from typing import Protocol, runtime_checkable

import numpy as np

from weylwalk_core import WeylPoint, vandermonde_rows


@runtime_checkable
class HFunction(Protocol):
    def __call__(self, x: WeylPoint) -> float: ...


@runtime_checkable
class RowHFunction(HFunction, Protocol):
    def rows(self, arr: np.ndarray) -> np.ndarray: ...


def evaluate_rows(h: HFunction, arr: np.ndarray) -> np.ndarray:
    """h on every row of arr (rows must lie in W)."""
    if isinstance(h, RowHFunction):
        return np.asarray(h.rows(arr), dtype=float)
    return np.array([h(WeylPoint.from_array(row)) for row in arr], dtype=float)


def is_flagged(h: HFunction) -> bool:
    return bool(getattr(h, "flagged", False))


class DeltaH:
    """h = Delta; the exact invariant function of Brownian motion."""

    flagged = False

    def __call__(self, x: WeylPoint) -> float:
        return float(vandermonde_rows(x.as_array()[None, :])[0])

    def rows(self, arr: np.ndarray) -> np.ndarray:
        return vandermonde_rows(arr)


class ConstantH:
    """h = 1; the sampler then conditions on survival up to its horizon."""

    flagged = False

    def __call__(self, x: WeylPoint) -> float:
        return 1.0

    def rows(self, arr: np.ndarray) -> np.ndarray:
        return np.ones(arr.shape[0])
