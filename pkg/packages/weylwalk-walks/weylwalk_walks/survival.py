"""
Survival-probability estimators for P(tau_x > n).

Direct Monte Carlo counts survivors. Multilevel splitting runs a fixed
population of particles through a list of level times; at each level the
survivors are resampled with replacement back to the population size and
the estimate is the product of per-level survival fractions.

Random streams: replicate r, level l use the cell `rng.substream(r, l)`.
The direct estimator is cell (0, 0), so splitting with a single level,
one replicate and particles == samples reproduces it exactly.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from weylwalk_core import Estimate, WeylPoint
from weylwalk_core.errors import ArgumentError

from .laws import StepLaw
from .paths import exit_times
from .rng import RngStream
from .runner import DEFAULT_BLOCK_SIZE, auxiliary_stream

logger = logging.getLogger(__name__)

DEGENERATE = "degenerate"


def _cell(rng: RngStream, replicate: int, level: int) -> RngStream:
    return rng.substream(replicate, level)


def survival_curve_direct(
    x: WeylPoint,
    law: StepLaw,
    horizons: list[int],
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> list[tuple[int, Estimate]]:
    """P(tau_x > n) for every n in `horizons`, on common random paths.

    The estimates are non-increasing in n by construction.
    """
    if samples < 1:
        raise ArgumentError(f"samples must be >= 1, got {samples}")
    if not horizons or any(b <= a for a, b in zip(horizons, horizons[1:])) or horizons[0] < 1:
        raise ArgumentError(f"horizons must be strictly increasing and >= 1: {horizons}")
    start = np.tile(x.as_array(), (samples, 1))
    tau, exited, _ = exit_times(start, law, horizons[-1], _cell(rng, 0, 0), block_size, workers)
    curve = []
    for n in horizons:
        survivors = int(np.count_nonzero(~exited | (tau > n)))
        curve.append((n, Estimate.from_proportion(survivors, samples)))
    return curve


def survival_prob_direct(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> Estimate:
    """Bernoulli estimate of P(tau_x > n) with binomial standard error."""
    return survival_curve_direct(x, law, [n], samples, rng, block_size, workers)[0][1]


def dyadic_levels(n: int, first: int = 1) -> list[int]:
    """first, 2*first, 4*first, ... below n, then n itself."""
    if n < 1 or first < 1:
        raise ArgumentError(f"need n >= 1 and first >= 1, got n={n}, first={first}")
    levels = []
    t = first
    while t < n:
        levels.append(t)
        t *= 2
    levels.append(n)
    return levels


@dataclass
class SplittingRun:
    """Per-replicate, per-level survival fractions of a splitting run."""

    level_times: list[int]
    particles: int
    fractions: np.ndarray
    """Shape (replicates, levels); zero after a population died out."""
    degenerate_replicates: list[int] = field(default_factory=list)

    @property
    def replicates(self) -> int:
        return int(self.fractions.shape[0])

    @property
    def cumulative(self) -> np.ndarray:
        """Running products: estimate of P(tau > t_l) per replicate."""
        return np.cumprod(self.fractions, axis=1)

    def estimate_at(self, level: int) -> Estimate:
        flags = (DEGENERATE,) if self.degenerate_replicates else ()
        products = self.cumulative[:, level]
        if self.replicates >= 2:
            return Estimate.from_samples(products, flags)
        fractions = self.fractions[0, : level + 1]
        n_total = self.particles * (level + 1)
        if level == 0:
            survivors = int(round(fractions[0] * self.particles))
            return Estimate.from_proportion(survivors, self.particles, flags)
        value = float(products[0])
        if value == 0.0:
            return Estimate.from_mean_stderr(0.0, 0.0, n_total, flags)
        # delta method for a product of independent binomial fractions
        rel_var = float(np.sum((1.0 - fractions) / (self.particles * fractions)))
        return Estimate.from_mean_stderr(value, value * math.sqrt(rel_var), n_total, flags)


def _check_levels(n: int, level_times: list[int], particles: int) -> None:
    if not level_times or level_times[-1] != n:
        raise ArgumentError(f"level_times must end at n={n}: {level_times}")
    if level_times[0] < 1 or any(b <= a for a, b in zip(level_times, level_times[1:])):
        raise ArgumentError(f"level_times must be strictly increasing and >= 1: {level_times}")
    if particles < 2:
        raise ArgumentError(f"particles_per_level must be >= 2, got {particles}")


def run_splitting(
    x: WeylPoint,
    law: StepLaw,
    level_times: list[int],
    particles: int,
    rng: RngStream,
    replicates: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> SplittingRun:
    """Fixed-effort multilevel splitting for P(tau_x > level_times[-1])."""
    _check_levels(level_times[-1] if level_times else 0, level_times, particles)
    if replicates < 1:
        raise ArgumentError(f"replicates must be >= 1, got {replicates}")
    fractions = np.zeros((replicates, len(level_times)))
    degenerate: list[int] = []
    start = np.tile(x.as_array(), (particles, 1))

    for r in range(replicates):
        positions = start
        previous = 0
        for level, t in enumerate(level_times):
            cell = _cell(rng, r, level)
            _, exited, moved = exit_times(positions, law, t - previous, cell, block_size, workers)
            survivors = moved[~exited]
            fractions[r, level] = survivors.shape[0] / particles
            logger.debug(
                f"splitting replicate {r} level {level} (t={t}): "
                f"{survivors.shape[0]}/{particles} survived"
            )
            if survivors.shape[0] == 0:
                logger.warning(
                    f"Splitting population died out at t={t} (replicate {r}); "
                    f"increase particles_per_level"
                )
                degenerate.append(r)
                break
            if level + 1 < len(level_times):
                gen = auxiliary_stream(cell).generator()
                positions = survivors[gen.integers(0, survivors.shape[0], size=particles)]
            previous = t

    return SplittingRun(
        level_times=list(level_times),
        particles=particles,
        fractions=fractions,
        degenerate_replicates=degenerate,
    )


def survival_prob_splitting(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    level_times: list[int],
    particles_per_level: int,
    rng: RngStream,
    replicates: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> Estimate:
    """Splitting estimate of P(tau_x > n).

    With replicates >= 2 the standard error is the batch-means error over
    independent replicates; with one replicate it is the delta-method
    binomial error. A population that dies out yields value 0 with the
    'degenerate' flag.
    """
    _check_levels(n, level_times, particles_per_level)
    run = run_splitting(x, law, level_times, particles_per_level, rng, replicates, block_size, workers)
    return run.estimate_at(len(level_times) - 1)


def survival_curve_splitting(
    x: WeylPoint,
    law: StepLaw,
    level_times: list[int],
    particles_per_level: int,
    rng: RngStream,
    replicates: int = 4,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> list[tuple[int, Estimate]]:
    """P(tau_x > t) at every level time of one splitting run."""
    run = run_splitting(x, law, level_times, particles_per_level, rng, replicates, block_size, workers)
    return [(t, run.estimate_at(i)) for i, t in enumerate(run.level_times)]
