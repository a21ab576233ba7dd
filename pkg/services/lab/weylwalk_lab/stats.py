"""
Statistics over aggregated Monte Carlo results: the survival tail exponent
and goodness-of-fit of rescaled endpoints against the limit laws.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import stats

from weylwalk_core import Estimate, in_weyl_rows
from weylwalk_core.errors import ArgumentError, DataError, DimensionError
from weylwalk_dyson import LimitDensity, gap_cdf_k2
from weylwalk_walks import RngStream

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4
MIN_GOF_SAMPLES = 500
# relative stderr floor, so exact inputs get equal finite weights
_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class TailFit:
    """log p(n) = intercept + slope * log n, fitted by weighted least squares."""

    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float
    points: tuple[int, ...]
    excluded: tuple[int, ...] = ()

    @property
    def exponent(self) -> float:
        return -self.slope

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)

    def exponent_interval(self, z: float = 1.96) -> tuple[float, float]:
        return (self.exponent - z * self.stderr_slope, self.exponent + z * self.stderr_slope)

    def as_row(self) -> dict[str, Any]:
        low, high = self.exponent_interval()
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr_slope": self.stderr_slope,
            "r_squared": self.r_squared,
            "exponent": self.exponent,
            "exponent_ci_low": low,
            "exponent_ci_high": high,
            "points": " ".join(str(n) for n in self.points),
            "excluded": " ".join(str(n) for n in self.excluded),
        }


def fit_tail_exponent(
    points: Sequence[tuple[int, Estimate]],
    max_relative_stderr: float = 0.3,
) -> TailFit:
    """Fit log p-hat against log n with weights 1/(relative stderr)^2.

    Points with a non-positive estimate or a relative stderr above
    `max_relative_stderr` are left out.

    Raises:
        DataError: fewer than 4 usable points.
    """
    used: list[tuple[int, Estimate]] = []
    excluded: list[int] = []
    for n, estimate in points:
        if n < 1:
            raise ArgumentError(f"horizons must be >= 1, got {n}")
        if estimate.value > 0 and estimate.relative_stderr <= max_relative_stderr:
            used.append((n, estimate))
        else:
            excluded.append(n)
    if excluded:
        logger.info(f"Tail fit excludes n = {excluded} (non-positive or relative stderr > {max_relative_stderr:g})")
    if len(used) < MIN_FIT_POINTS:
        raise DataError(f"need >= {MIN_FIT_POINTS} usable points for a tail fit, got {len(used)}")

    x = np.log([float(n) for n, _ in used])
    y = np.log([e.value for _, e in used])
    sigma = np.maximum([e.relative_stderr for _, e in used], _REL_FLOOR)
    (slope, intercept), cov = np.polyfit(x, y, 1, w=1.0 / sigma, cov="unscaled")

    w = 1.0 / sigma**2
    y_bar = np.sum(w * y) / np.sum(w)
    ss_res = float(np.sum(w * (y - (intercept + slope * x)) ** 2))
    ss_tot = float(np.sum(w * (y - y_bar) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    return TailFit(
        slope=float(slope),
        intercept=float(intercept),
        stderr_slope=float(math.sqrt(max(cov[0, 0], 0.0))),
        r_squared=r_squared,
        points=tuple(n for n, _ in used),
        excluded=tuple(excluded),
    )


def light_tail_exponent(k: int) -> float:
    """k(k-1)/4, the survival exponent under finite variance."""
    if k < 2:
        raise DimensionError(f"k must be >= 2, got {k}")
    return k * (k - 1) / 4


def conjectured_exponent(k: int, j: int, alpha: float) -> float:
    """(k-j)(k-j-1)/4 + alpha*j/2 for steps with tail index alpha.

    The expression is meant for k-j-1 < alpha < k-j; outside that regime it
    is still returned, with a warning.
    """
    if k < 2:
        raise DimensionError(f"k must be >= 2, got {k}")
    if not 0 <= j <= k - 1:
        raise ArgumentError(f"j must lie in [0, k-1], got {j}")
    if j == 0:
        return light_tail_exponent(k)
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    m = k - j
    if not m - 1 < alpha < m:
        logger.warning(f"alpha = {alpha:g} lies outside ({m - 1}, {m}) for k={k}, j={j}; exponent is outside its regime")
    return m * (m - 1) / 4 + alpha * j / 2


@dataclass(frozen=True)
class GofReport:
    """Goodness-of-fit of rescaled endpoints against a limit law."""

    test: str
    """'ks' (k=2 gap marginal) or 'chi2' (binned gap coordinates)."""
    statistic: float
    pvalue: float
    samples: int
    k: int
    beta: int
    distance: float
    """KS distance, or half the L1 distance between binned proportions."""
    cells: int = 0
    flags: tuple[str, ...] = field(default_factory=tuple)

    def passed(self, level: float = 0.01) -> bool:
        return self.pvalue > level

    def as_row(self) -> dict[str, Any]:
        return {
            "test": self.test,
            "k": self.k,
            "beta": self.beta,
            "samples": self.samples,
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "distance": self.distance,
            "cells": self.cells,
            "flags": " ".join(self.flags),
        }


def default_bins_per_gap(k: int) -> int:
    return {3: 5, 4: 3}.get(k, 2)


def _cell_index(gaps: np.ndarray, edges: list[np.ndarray], bins: int) -> np.ndarray:
    index = np.zeros(gaps.shape[0], dtype=np.int64)
    for j, cut in enumerate(edges):
        index = index * bins + np.searchsorted(cut, gaps[:, j], side="right")
    return index


def weighted_ks(values: np.ndarray, weights: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sup distance between the weighted ECDF of values and cdf."""
    order = np.argsort(values)
    x = values[order]
    w = weights[order] / np.sum(weights)
    upper = np.cumsum(w)
    lower = upper - w
    f = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(upper - f), np.max(f - lower)))


def gof_against_mu(
    samples: np.ndarray,
    rng: RngStream | None = None,
    beta: int = 1,
    bins_per_gap: int | None = None,
    reference_size: int | None = None,
    weights: np.ndarray | None = None,
    design_effect: float = 1.0,
) -> GofReport:
    """Test rescaled endpoints against mu (beta=1) or the Delta^2 law (beta=2).

    k=2 uses a KS test on the gap against its closed-form CDF. For k >= 3
    the gap coordinates are binned on a product of per-gap equal-probability
    bins estimated from a reference sample of the limit law, and the two
    samples are compared by a chi-squared homogeneity test, which accounts
    for the reference noise.

    Weighted samples (particle ensembles) are tested through their weighted
    ECDF or weighted cell proportions at a nominal sample size of
    ESS / design_effect.

    Args:
        samples: Rescaled endpoints, shape (n, k), rows in W.
        rng: Stream for the reference sample (k >= 3 only).
        weights: Non-negative weight per row; None means independent draws.
        design_effect: Variance inflation from correlated rows, >= 1.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DimensionError(f"samples must have shape (n, k) with k >= 2, got {arr.shape}")
    if arr.shape[0] < 2:
        raise ArgumentError(f"need at least 2 samples, got {arr.shape[0]}")
    if not np.all(in_weyl_rows(arr)):
        raise ArgumentError("every sample must lie in W")
    if design_effect < 1.0:
        raise ArgumentError(f"design_effect must be >= 1, got {design_effect}")
    rows, k = arr.shape
    flags: list[str] = []
    if weights is None:
        w = np.ones(rows)
        n = rows
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (rows,) or np.any(w < 0) or not np.sum(w) > 0:
            raise ArgumentError("weights must be one non-negative value per row with a positive sum")
        ess = float(np.sum(w)) ** 2 / float(np.sum(w**2))
        n = max(2, int(ess / design_effect))
        flags.append("weighted")
        logger.info(
            f"Weighted goodness-of-fit: {rows} rows, ESS {ess:.0f}, design effect {design_effect:.2f} -> n = {n}"
        )
    if n < MIN_GOF_SAMPLES:
        logger.warning(f"Goodness-of-fit on {n} < {MIN_GOF_SAMPLES} samples has little power")
        flags.append("low_power")

    gaps = np.diff(arr, axis=1)
    if k == 2:
        if weights is None:
            result = stats.kstest(gaps[:, 0], lambda g: gap_cdf_k2(g, beta=beta))
            statistic, pvalue = float(result.statistic), float(result.pvalue)
        else:
            statistic = weighted_ks(gaps[:, 0], w, lambda g: gap_cdf_k2(g, beta=beta))
            pvalue = float(stats.kstwo.sf(statistic, n))
        return GofReport(
            test="ks",
            statistic=statistic,
            pvalue=pvalue,
            samples=n,
            k=k,
            beta=beta,
            distance=statistic,
            flags=tuple(flags),
        )

    if rng is None:
        raise ArgumentError("k >= 3 needs an rng for the reference sample")
    bins = bins_per_gap or default_bins_per_gap(k)
    size = reference_size or max(10 * n, 20_000)
    reference = np.diff(LimitDensity(k, beta).sample(size, rng), axis=1)
    quantiles = np.linspace(0.0, 1.0, bins + 1)[1:-1]
    edges = [np.quantile(reference[:, j], quantiles) for j in range(k - 1)]
    cells = bins ** (k - 1)
    proportions = np.bincount(_cell_index(gaps, edges, bins), weights=w, minlength=cells) / np.sum(w)
    observed = n * proportions
    expected = np.bincount(_cell_index(reference, edges, bins), minlength=cells)
    table = np.vstack([observed, expected])
    table = table[:, table.sum(axis=0) > 0]
    result = stats.chi2_contingency(table, correction=False)
    distance = 0.5 * float(np.sum(np.abs(proportions - expected / size)))
    logger.debug(f"chi2 against beta={beta} law: {table.shape[1]} cells, {size} reference draws")
    return GofReport(
        test="chi2",
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        samples=n,
        k=k,
        beta=beta,
        distance=distance,
        cells=int(table.shape[1]),
        flags=tuple(flags),
    )
