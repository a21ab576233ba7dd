"""
Weighted-particle sampler for h-transformed walks.

Particles move under the unconditioned step law. After every step a
particle that left W is dropped, and a survivor's weight is multiplied by
h(new)/h(old), so that between resampling events the weight telescopes to
h(endpoint)/h(anchor). Systematic resampling restores the population when
the effective sample size falls below a fraction of it.

With h = V the weighted endpoints follow the V-transform; with h = 1 they
follow the walk conditioned on tau > n.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from weylwalk_core import Estimate, WeylPoint, in_weyl_rows
from weylwalk_core.errors import ArgumentError, DegenerateRunError
from weylwalk_walks import RngStream, StepLaw

from .hfunctions import HFunction, evaluate_rows, is_flagged

logger = logging.getLogger(__name__)

DEFAULT_ESS_FRACTION = 0.5


def effective_sample_size(weights: np.ndarray) -> float:
    """(sum w)^2 / sum w^2; 0 for an empty or all-zero vector."""
    total = float(np.sum(weights))
    squares = float(np.sum(np.square(weights)))
    return total * total / squares if squares > 0 else 0.0


def systematic_resample(weights: np.ndarray, size: int, gen: np.random.Generator) -> np.ndarray:
    """Indices of a low-variance resample of `size` draws from weights."""
    cumsum = np.cumsum(weights)
    cumsum /= cumsum[-1]
    cumsum[-1] = 1.0
    u0 = gen.uniform(0.0, 1.0 / size)
    positions = u0 + np.arange(size) / size
    return np.searchsorted(cumsum, positions)


@dataclass
class ParticleEnsemble:
    """Weighted endpoints of the particle population at step_index."""

    positions: np.ndarray
    """Endpoints, shape (count, k); every row lies in W."""
    weights: np.ndarray
    step_index: int
    anchors: np.ndarray
    """h at each particle's position when its weight was last reset."""
    bases: np.ndarray
    """Weight each particle was reset to at that time."""
    heights: np.ndarray
    """h at the current positions."""
    resamples: int = 0
    trace: list[tuple[int, np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def k(self) -> int:
        return int(self.positions.shape[1])

    @property
    def ess(self) -> float:
        return effective_sample_size(self.weights)

    def normalized_weights(self) -> np.ndarray:
        return self.weights / np.sum(self.weights)

    def endpoints(self) -> list[tuple[WeylPoint, float]]:
        return [
            (WeylPoint.from_array(position), float(w))
            for position, w in zip(self.positions, self.weights)
        ]

    def weighted_mean(self, values: np.ndarray) -> float:
        """Weighted average of one value per particle."""
        return float(np.average(values, weights=self.weights))

    def telescoping_error(self) -> float:
        """Largest relative gap between each weight and base * h(now)/h(anchor)."""
        expected = self.bases * self.heights / self.anchors
        return float(np.max(np.abs(self.weights - expected) / expected))

    def draw_endpoints(self, rng: RngStream, size: int) -> np.ndarray:
        """Unweighted endpoint sample of the given size, by systematic resampling.

        Draws share ancestors and are not independent; statistics should use
        the weights of an EnsembleReplicates instead.
        """
        gen = rng.generator()
        index = systematic_resample(self.weights, size, gen)
        return self.positions[gen.permutation(index)]


def _reset(ensemble: ParticleEnsemble, index: np.ndarray, particles: int) -> None:
    mean_weight = float(np.sum(ensemble.weights)) / particles
    ensemble.positions = ensemble.positions[index]
    ensemble.heights = ensemble.heights[index]
    ensemble.anchors = ensemble.heights.copy()
    ensemble.weights = np.full(particles, mean_weight)
    ensemble.bases = ensemble.weights.copy()
    ensemble.resamples += 1


def sample_conditioned_paths(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    particles: int,
    h: HFunction,
    rng: RngStream,
    ess_fraction: float = DEFAULT_ESS_FRACTION,
    record_paths: bool = False,
) -> ParticleEnsemble:
    """Propagate `particles` walks from x for n steps under the h-transform.

    Step t draws increments from rng.substream(0, t) and, when it
    resamples, the offset from rng.substream(1, t).

    Args:
        h: Positive function on W, typically a frozen VTable, DeltaH or
            ConstantH. Flagged h-functions are refused.
        ess_fraction: Resample when ess < ess_fraction * particles.
        record_paths: Keep (step, positions, weights) after every step.

    Raises:
        ArgumentError: h is flagged or the sizes are out of range.
        DegenerateRunError: every particle left W.
    """
    if is_flagged(h):
        raise ArgumentError("h-function has non-positive entries; rebuild it before sampling")
    if n < 0 or particles < 1:
        raise ArgumentError(f"need n >= 0 and particles >= 1, got n={n}, particles={particles}")
    if not 0.0 < ess_fraction <= 1.0:
        raise ArgumentError(f"ess_fraction must be in (0, 1], got {ess_fraction}")

    start = np.tile(x.as_array(), (particles, 1))
    h_start = evaluate_rows(h, start[:1])[0]
    if not h_start > 0:
        raise ArgumentError(f"h({x.coords}) = {h_start} is not positive")
    ensemble = ParticleEnsemble(
        positions=start,
        weights=np.ones(particles),
        step_index=0,
        anchors=np.full(particles, h_start),
        bases=np.ones(particles),
        heights=np.full(particles, h_start),
    )
    if record_paths:
        ensemble.trace.append((0, ensemble.positions.copy(), ensemble.weights.copy()))

    for t in range(1, n + 1):
        gen = rng.substream(0, t).generator()
        moved = ensemble.positions + law.sample(gen, ensemble.positions.shape)
        alive = in_weyl_rows(moved)
        heights = np.zeros(moved.shape[0])
        if alive.any():
            heights[alive] = evaluate_rows(h, moved[alive])
        alive &= heights > 0
        if not alive.any():
            raise DegenerateRunError(
                f"all particles left W at step {t}",
                diagnostics={
                    "step": t,
                    "particles": particles,
                    "alive_before": ensemble.count,
                    "ess_before": ensemble.ess,
                    "resamples": ensemble.resamples,
                },
            )
        ensemble.weights = ensemble.weights[alive] * (heights[alive] / ensemble.heights[alive])
        ensemble.positions = moved[alive]
        ensemble.heights = heights[alive]
        ensemble.anchors = ensemble.anchors[alive]
        ensemble.bases = ensemble.bases[alive]
        ensemble.step_index = t

        ess = ensemble.ess
        if ess < ess_fraction * particles:
            logger.debug(f"Step {t}: ess {ess:.1f} of {particles}, {ensemble.count} alive; resampling")
            index = systematic_resample(ensemble.weights, particles, rng.substream(1, t).generator())
            _reset(ensemble, index, particles)
        if record_paths:
            ensemble.trace.append((t, ensemble.positions.copy(), ensemble.weights.copy()))

    logger.info(
        f"Particle sampler: {particles} particles, n={n}, {ensemble.resamples} resamples, "
        f"final ess {ensemble.ess:.1f}"
    )
    return ensemble


@dataclass
class EnsembleReplicates:
    """Independent particle ensembles of one conditioned law.

    Particles inside an ensemble share ancestors through resampling, so
    their endpoints are correlated. Ensembles are independent, which gives
    honest standard errors (spread of the per-ensemble means) and a design
    effect that converts the weight ESS into an effective sample size.
    """

    ensembles: list[ParticleEnsemble]

    @property
    def replicates(self) -> int:
        return len(self.ensembles)

    @property
    def count(self) -> int:
        return sum(e.count for e in self.ensembles)

    @property
    def resamples(self) -> int:
        return sum(e.resamples for e in self.ensembles)

    def pooled(self) -> tuple[np.ndarray, np.ndarray]:
        """All endpoints with weights normalised to 1/replicates per ensemble."""
        positions = np.concatenate([e.positions for e in self.ensembles])
        weights = np.concatenate([e.normalized_weights() / self.replicates for e in self.ensembles])
        return positions, weights

    @property
    def ess(self) -> float:
        return effective_sample_size(self.pooled()[1])

    def replicate_means(self, statistic: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Weighted mean of statistic(positions) within every ensemble."""
        return np.array([e.weighted_mean(statistic(e.positions)) for e in self.ensembles])

    def mean_estimate(self, statistic: Callable[[np.ndarray], np.ndarray]) -> Estimate:
        """Pooled mean of a per-particle statistic; stderr from the replicate spread."""
        if self.replicates < 2:
            raise ArgumentError("a replicate standard error needs at least 2 ensembles")
        return Estimate.from_samples(self.replicate_means(statistic))

    def design_effect(self, statistic: Callable[[np.ndarray], np.ndarray]) -> float:
        """Observed variance of the replicate means over the variance an
        ESS-sized independent sample would give; never below 1."""
        if self.replicates < 2:
            logger.warning("One ensemble; design effect taken as 1")
            return 1.0
        naive = []
        for e in self.ensembles:
            values = statistic(e.positions)
            mean = e.weighted_mean(values)
            spread = e.weighted_mean((values - mean) ** 2)
            naive.append(spread / max(e.ess, 1.0))
        observed = float(np.var(self.replicate_means(statistic), ddof=1))
        reference = float(np.mean(naive))
        if reference <= 0:
            return 1.0
        return max(1.0, observed / reference)

    def draw_endpoints(self, rng: RngStream, size: int) -> np.ndarray:
        """Resampled endpoints for plotting; correlated like ParticleEnsemble.draw_endpoints."""
        positions, weights = self.pooled()
        gen = rng.generator()
        index = systematic_resample(weights, size, gen)
        return positions[gen.permutation(index)]


def sample_replicate_ensembles(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    particles: int,
    h: HFunction,
    rng: RngStream,
    replicates: int,
    ess_fraction: float = DEFAULT_ESS_FRACTION,
    record_paths: bool = False,
) -> EnsembleReplicates:
    """Split `particles` over `replicates` independent ensembles.

    Ensemble r runs sample_conditioned_paths on rng.substream(r); only the
    first one records paths.
    """
    if replicates < 1 or particles < replicates:
        raise ArgumentError(f"need 1 <= replicates <= particles, got {replicates} and {particles}")
    size = particles // replicates
    logger.info(f"{replicates} independent ensembles of {size} particles")
    return EnsembleReplicates(ensembles=[
        sample_conditioned_paths(
            x, law, n, size, h, rng.substream(r), ess_fraction, record_paths=record_paths and r == 0
        )
        for r in range(replicates)
    ])
