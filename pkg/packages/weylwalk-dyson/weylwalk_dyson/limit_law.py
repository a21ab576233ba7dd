"""
Limit laws on W with density proportional to Delta(y)^beta e^{-|y|^2/2}.

beta = 1 is the law of the rescaled walk conditioned on survival (mu);
beta = 2 is the GUE eigenvalue law, the time-1 marginal of Dyson Brownian
motion from the origin and the rescaled limit of the V-transformed walk.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from weylwalk_core import WeylPoint, in_weyl_rows, vandermonde_rows
from weylwalk_core.errors import ArgumentError, DimensionError, EnvelopeError
from weylwalk_walks import RngStream

from .constants import log_hermite_envelope, mehta_integral

logger = logging.getLogger(__name__)

PROPOSAL_SCALE = math.sqrt(2.0)
ENVELOPE_SLACK = 1e-9
MIN_BATCH = 1024


@dataclass(frozen=True)
class LimitDensity:
    """Density Delta(y)^beta e^{-|y|^2/2} / Z on W."""

    k: int
    beta: int = 1

    def __post_init__(self) -> None:
        if self.k < 2:
            raise DimensionError(f"k must be >= 2, got {self.k}")
        if self.beta not in (1, 2):
            raise ArgumentError(f"beta must be 1 or 2, got {self.beta}")

    @cached_property
    def normalizer(self) -> float:
        """Z = int_W Delta^beta e^{-|y|^2/2} dy, from Mehta's integral."""
        return mehta_integral(self.k, self.beta / 2) / math.factorial(self.k)

    @cached_property
    def log_envelope(self) -> float:
        return log_hermite_envelope(self.k, self.beta)

    def pdf_rows(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=float)
        inside = in_weyl_rows(arr)
        values = np.zeros(arr.shape[0])
        rows = arr[inside]
        values[inside] = (
            vandermonde_rows(rows) ** self.beta * np.exp(-np.sum(rows**2, axis=1) / 2) / self.normalizer
        )
        return values

    def pdf(self, y: WeylPoint) -> float:
        if y.k != self.k:
            raise DimensionError(f"expected a point with k={self.k}, got k={y.k}")
        return float(self.pdf_rows(y.as_array()[None, :])[0])

    def sample(self, samples: int, rng: RngStream) -> np.ndarray:
        """Exact draws, shape (samples, k), by rejection from sorted N(0, 2 I).

        The acceptance ratio Delta^beta e^{-|y|^2/4} is bounded by its
        value at sqrt(2 beta) times the Hermite zeros.

        Raises:
            EnvelopeError: a proposal exceeded the envelope.
        """
        if samples < 1:
            raise ArgumentError(f"samples must be >= 1, got {samples}")
        gen = rng.generator()
        accepted: list[np.ndarray] = []
        have = 0
        proposed = 0
        rate = 0.5
        while have < samples:
            batch = max(MIN_BATCH, int(1.2 * (samples - have) / rate))
            y = np.sort(PROPOSAL_SCALE * gen.standard_normal((batch, self.k)), axis=1)
            log_ratio = np.full(batch, -np.inf)
            inside = in_weyl_rows(y)
            log_ratio[inside] = (
                self.beta * np.log(vandermonde_rows(y[inside]))
                - np.sum(y[inside] ** 2, axis=1) / 4
                - self.log_envelope
            )
            if np.any(log_ratio > ENVELOPE_SLACK):
                raise EnvelopeError(
                    f"acceptance ratio {math.exp(float(np.max(log_ratio))):.6g} > 1 "
                    f"for k={self.k}, beta={self.beta}"
                )
            keep = np.log(gen.random(batch)) < log_ratio
            accepted.append(y[keep])
            have += int(keep.sum())
            proposed += batch
            rate = max(have / proposed, 1e-6)
        logger.debug(f"Limit law k={self.k}, beta={self.beta}: acceptance {have / proposed:.3f}")
        return np.concatenate(accepted)[:samples]

    def gap_marginal_k2(self) -> stats.rv_continuous:
        """Law of y2 - y1 at k=2: sqrt(2) times a chi variable with 1 + beta degrees."""
        if self.k != 2:
            raise DimensionError(f"closed-form gap marginal exists for k=2 only, got k={self.k}")
        return stats.chi(df=1 + self.beta, scale=math.sqrt(2.0))


def mu_density(y: WeylPoint) -> float:
    return LimitDensity(y.k, 1).pdf(y)


def sample_mu(k: int, samples: int, rng: RngStream) -> np.ndarray:
    return LimitDensity(k, 1).sample(samples, rng)


def sample_delta_squared(k: int, samples: int, rng: RngStream) -> np.ndarray:
    return LimitDensity(k, 2).sample(samples, rng)


def gap_cdf_k2(g: np.ndarray | float, beta: int = 1) -> np.ndarray:
    return LimitDensity(2, beta).gap_marginal_k2().cdf(g)


def mean_gap_k2(beta: int = 1) -> float:
    """sqrt(pi) for beta = 1, 4/sqrt(pi) for beta = 2."""
    return float(LimitDensity(2, beta).gap_marginal_k2().mean())
