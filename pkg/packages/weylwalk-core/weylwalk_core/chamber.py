"""
Weyl-chamber predicates and Vandermonde evaluation.

Every scalar operation has a row-vectorised twin (suffix `_rows`) taking an
array of shape (paths, k); the walk engine only uses the row versions.

Delta(x) = prod_{i<j} (x(j) - x(i)) is evaluated as a direct product for
k <= DIRECT_PRODUCT_MAX_K (at most 28 factors, which cannot overflow for
coordinates below 1e10) and by signed-log accumulation above that.
"""

import math
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, DimensionError
from .types import PointLike, SignedLog, as_coords

DIRECT_PRODUCT_MAX_K = 8


@lru_cache(maxsize=64)
def pair_indices(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (i, j) over all pairs i < j."""
    i_idx, j_idx = np.triu_indices(k, 1)
    return i_idx, j_idx


def _checked(x: PointLike) -> np.ndarray:
    coords = as_coords(x)
    if coords.size < 2:
        raise DimensionError(f"need k >= 2 coordinates, got {coords.size}")
    return coords


def _checked_rows(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DimensionError(f"expected an array of shape (paths, k>=2), got {arr.shape}")
    return arr


def pairwise_differences(x: PointLike) -> np.ndarray:
    """x(j) - x(i) for all i < j, in row-major pair order."""
    coords = _checked(x)
    i_idx, j_idx = pair_indices(coords.size)
    return coords[j_idx] - coords[i_idx]


def pairwise_differences_rows(arr: np.ndarray) -> np.ndarray:
    arr = _checked_rows(arr)
    i_idx, j_idx = pair_indices(arr.shape[1])
    return arr[:, j_idx] - arr[:, i_idx]


def vandermonde_signed_log(x: PointLike) -> SignedLog:
    """Sign and log|Delta(x)|; sign is 0 iff two coordinates coincide."""
    diffs = pairwise_differences(x)
    if np.any(diffs == 0):
        return SignedLog(sign=0, log_magnitude=-math.inf)
    negatives = int(np.count_nonzero(diffs < 0))
    log_magnitude = math.fsum(np.log(np.abs(diffs)).tolist())
    return SignedLog(sign=-1 if negatives % 2 else 1, log_magnitude=log_magnitude)


def vandermonde(x: PointLike) -> float:
    """Delta(x); positive on W, zero iff two coordinates are equal."""
    coords = _checked(x)
    if coords.size > DIRECT_PRODUCT_MAX_K:
        return vandermonde_signed_log(coords).value()
    return float(np.prod(pairwise_differences(coords)))


def vandermonde_rows(arr: np.ndarray) -> np.ndarray:
    diffs = pairwise_differences_rows(arr)
    if arr.shape[1] <= DIRECT_PRODUCT_MAX_K:
        return np.prod(diffs, axis=1)
    signs = np.prod(np.sign(diffs), axis=1)
    with np.errstate(divide="ignore"):
        logs = np.sum(np.log(np.abs(diffs)), axis=1)
    return signs * np.exp(logs)


def perturbed_vandermonde(x: PointLike, t: float) -> float:
    """Delta_t(x) = prod_{i<j} (t + |x(j) - x(i)|), t >= 0."""
    if not t >= 0:
        raise ArgumentError(f"t must be non-negative, got {t}")
    factors = t + np.abs(pairwise_differences(x))
    if factors.size > DIRECT_PRODUCT_MAX_K * (DIRECT_PRODUCT_MAX_K - 1) // 2:
        if np.any(factors == 0):
            return 0.0
        return math.exp(math.fsum(np.log(factors).tolist()))
    return float(np.prod(factors))


def perturbed_vandermonde_rows(arr: np.ndarray, t: float) -> np.ndarray:
    if not t >= 0:
        raise ArgumentError(f"t must be non-negative, got {t}")
    return np.prod(t + np.abs(pairwise_differences_rows(arr)), axis=1)


def in_weyl(x: PointLike) -> bool:
    """True iff coordinates are strictly increasing (W is open: ties are outside)."""
    coords = as_coords(x)
    return bool(np.all(np.diff(coords) > 0))


def in_weyl_rows(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    return np.all(np.diff(arr, axis=1) > 0, axis=1)


def separation_threshold(n: int, eps: float) -> float:
    """n^(1/2 - eps), the gap every pair must exceed inside W_{n,eps}."""
    if int(n) != n or n < 1:
        raise ArgumentError(f"n must be an integer >= 1, got {n}")
    if not 0 < eps < 0.5:
        raise ArgumentError(f"eps must lie in (0, 1/2), got {eps}")
    return math.pow(n, 0.5 - eps)


def in_weyl_eps(x: PointLike, n: int, eps: float) -> bool:
    """Membership in W_{n,eps}: all pairwise |gaps| strictly exceed n^(1/2-eps).

    Ordering is not required.
    """
    threshold = separation_threshold(n, eps)
    return bool(np.all(np.abs(pairwise_differences(x)) > threshold))


def in_weyl_eps_rows(arr: np.ndarray, threshold: float) -> np.ndarray:
    return np.all(np.abs(pairwise_differences_rows(arr)) > threshold, axis=1)


def gap_coordinates_rows(arr: np.ndarray) -> np.ndarray:
    """Adjacent gaps, shape (paths, k-1)."""
    return np.diff(np.asarray(arr, dtype=float), axis=1)
