"""
Estimators of the invariant function V and of V^(T).

    V(x)     = Delta(x) - E Delta(x + S_tau)
             = lim_n E[Delta(x + S_n); tau > n]
    V^(T)(x) = lim_n E[Delta(x + S_n); T > n]

The stopped estimator averages Delta(x + S_tau) 1{tau <= N} over paths
(censored paths contribute 0) and subtracts it from Delta(x). Its
truncation bias is +E[Delta(x + S_tau); tau > N]. At k=2 the exit Delta is
never positive, so the estimate only grows towards V with N. On common paths

    mean(Delta(x + S_tau) 1{tau <= N}) + estimate_v_limit(N) = mean Delta(x + S_{tau ^ N}),

whose expectation is Delta(x).
"""

import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict

from weylwalk_core import Estimate, WeylPoint, as_coords, vandermonde, vandermonde_rows
from weylwalk_core.errors import ArgumentError, DimensionError
from weylwalk_walks import (
    DEFAULT_BLOCK_SIZE,
    RngStream,
    StepLaw,
    StopRule,
    exit_times,
    exact_one_step_defect,
)

from .hfunctions import HFunction, evaluate_rows

logger = logging.getLogger(__name__)

DEFAULT_CENSORED_TARGET = 0.01
DEFAULT_MAX_HORIZON = 2**20


class VMethod(str, Enum):
    """How a V value was obtained."""
    STOPPED = "stopped"
    LIMIT = "limit"
    AUXILIARY_T = "auxiliary_T"
    EXACT_LATTICE = "exact_lattice"


class BiasNote(str, Enum):
    UNBIASED_EXACT = "unbiased_exact"
    TRUNCATION_BIASED = "truncation_biased"


class VEstimate(BaseModel):
    """A V estimate with its provenance.

    Non-positive values are flagged, never clamped; h-transform samplers
    refuse flagged estimates.
    """

    model_config = ConfigDict(frozen=True)

    v_hat: Estimate
    method: VMethod
    horizon: int
    bias_note: BiasNote
    censored_fraction: float = 0.0
    """Fraction of paths not yet stopped at the horizon."""

    @property
    def value(self) -> float:
        return self.v_hat.value

    @property
    def flagged(self) -> bool:
        return not self.v_hat.value > 0


class PathFront:
    """A population of paths advanced segment by segment on common random numbers.

    Segment i draws from the cell rng.substream(0, i), so the first segment
    uses the same cell as the direct survival estimator.
    """

    def __init__(
        self,
        start: np.ndarray,
        samples: int,
        law: StepLaw,
        rng: RngStream,
        rule: StopRule,
        block_size: int,
        workers: int,
    ):
        self.position = np.tile(start, (samples, 1))
        self.alive = np.ones(samples, dtype=bool)
        self.elapsed = 0
        self.segment = 0
        self.law = law
        self.rng = rng
        self.rule = rule
        self.block_size = block_size
        self.workers = workers

    def advance(self, horizon: int) -> None:
        if horizon < self.elapsed:
            raise ArgumentError(f"cannot rewind paths from {self.elapsed} to {horizon}")
        idx = np.flatnonzero(self.alive)
        if horizon > self.elapsed and idx.size:
            cell = self.rng.substream(0, self.segment)
            _, stopped, moved = exit_times(
                self.position[idx],
                self.law,
                horizon - self.elapsed,
                cell,
                self.block_size,
                self.workers,
                self.rule,
            )
            self.position[idx] = moved
            self.alive[idx[stopped]] = False
        self.segment += 1
        self.elapsed = horizon

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(self.alive))

    def delta_alive(self) -> np.ndarray:
        """Delta at the current time on live paths, 0 elsewhere."""
        return np.where(self.alive, vandermonde_rows(self.position), 0.0)

    def delta_stopped(self) -> np.ndarray:
        """Delta at the stopping time on stopped paths, 0 elsewhere."""
        return np.where(self.alive, 0.0, vandermonde_rows(self.position))


def _check_budget(samples: int, horizons: list[int]) -> None:
    if samples < 1:
        raise ArgumentError(f"samples must be >= 1, got {samples}")
    if not horizons or horizons[0] < 0 or any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ArgumentError(f"horizons must be non-negative and strictly increasing: {horizons}")


def _flag_nonpositive(estimate: VEstimate, x: WeylPoint | np.ndarray) -> VEstimate:
    if estimate.flagged:
        logger.warning(
            f"Non-positive V estimate {estimate.value:.4g} at {tuple(as_coords(x))} "
            f"({estimate.method.value}, n={estimate.horizon}); flagged"
        )
        return estimate.model_copy(update={"v_hat": estimate.v_hat.with_flags("nonpositive")})
    return estimate


def estimate_v_stopped(
    x: WeylPoint,
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
    adaptive: bool = False,
    censored_target: float = DEFAULT_CENSORED_TARGET,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> VEstimate:
    """V(x) = Delta(x) - E Delta(x + S_tau) truncated at `horizon`.

    Args:
        adaptive: Double the horizon, continuing the same paths, until the
            censored fraction drops below `censored_target` or the horizon
            reaches `max_horizon`.
    """
    _check_budget(samples, [horizon])
    if horizon < 1:
        raise ArgumentError(f"horizon must be >= 1, got {horizon}")
    front = PathFront(x.as_array(), samples, law, rng, StopRule.TAU, block_size, workers)
    front.advance(horizon)
    while adaptive and front.censored_fraction >= censored_target and front.elapsed < max_horizon:
        logger.debug(
            f"censored fraction {front.censored_fraction:.3%} at n={front.elapsed}, doubling"
        )
        front.advance(min(2 * front.elapsed, max_horizon))

    censored = front.censored_fraction
    exit_mean = Estimate.from_samples(front.delta_stopped())
    v_hat = Estimate.from_mean_stderr(
        vandermonde(x) - exit_mean.value, exit_mean.stderr, samples
    )
    if censored > 0:
        v_hat = v_hat.with_flags(BiasNote.TRUNCATION_BIASED.value)
        if x.k == 2:
            logger.warning(
                f"k=2 exit times have infinite mean; stopped V estimate at {x.coords} "
                f"is truncation biased ({censored:.2%} censored at n={front.elapsed})"
            )
        elif adaptive and censored >= censored_target:
            logger.warning(
                f"max_horizon {max_horizon} reached with {censored:.2%} of paths censored"
            )
    estimate = VEstimate(
        v_hat=v_hat,
        method=VMethod.STOPPED,
        horizon=front.elapsed,
        bias_note=BiasNote.TRUNCATION_BIASED if censored > 0 else BiasNote.UNBIASED_EXACT,
        censored_fraction=censored,
    )
    return _flag_nonpositive(estimate, x)


def _limit_curve(
    start: np.ndarray,
    law: StepLaw,
    horizons: list[int],
    samples: int,
    rng: RngStream,
    rule: StopRule,
    method: VMethod,
    block_size: int,
    workers: int,
) -> list[tuple[int, VEstimate]]:
    _check_budget(samples, horizons)
    front = PathFront(start, samples, law, rng, rule, block_size, workers)
    delta_start = vandermonde(start)
    curve = []
    for n in horizons:
        if n == 0:
            v_hat = Estimate.from_mean_stderr(delta_start, 0.0, samples)
            bias = BiasNote.UNBIASED_EXACT
        else:
            front.advance(n)
            v_hat = Estimate.from_samples(front.delta_alive())
            bias = BiasNote.TRUNCATION_BIASED
        estimate = VEstimate(
            v_hat=v_hat,
            method=method,
            horizon=n,
            bias_note=bias,
            censored_fraction=front.censored_fraction,
        )
        curve.append((n, _flag_nonpositive(estimate, start)))
    return curve


def estimate_v_limit(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> VEstimate:
    """E[Delta(x + S_n); tau_x > n]; n = 0 gives Delta(x)."""
    return estimate_v_limit_curve(x, law, [n], samples, rng, block_size, workers)[0][1]


def estimate_v_limit_curve(
    x: WeylPoint,
    law: StepLaw,
    horizons: list[int],
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> list[tuple[int, VEstimate]]:
    """estimate_v_limit at every horizon, on common paths."""
    return _limit_curve(
        x.as_array(), law, horizons, samples, rng, StopRule.TAU, VMethod.LIMIT, block_size, workers
    )


def _auxiliary_start(x: WeylPoint | np.ndarray) -> np.ndarray:
    start = as_coords(x)
    if not vandermonde(start) > 0:
        raise ArgumentError(f"V^(T) needs Delta(x) > 0, got Delta{tuple(start)} = {vandermonde(start)}")
    return start


def estimate_vT(
    x: WeylPoint | np.ndarray,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> VEstimate:
    """E[Delta(x + S_n); T > n] with T the first time Delta <= 0.

    The start only needs Delta(x) > 0, not x in W.
    """
    return estimate_vT_curve(x, law, [n], samples, rng, block_size, workers)[0][1]


def estimate_vT_curve(
    x: WeylPoint | np.ndarray,
    law: StepLaw,
    horizons: list[int],
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> list[tuple[int, VEstimate]]:
    start = _auxiliary_start(x)
    return _limit_curve(
        start, law, horizons, samples, rng, StopRule.T, VMethod.AUXILIARY_T, block_size, workers
    )


def exact_lattice_v(gap: int) -> float:
    """V for k=2 Rademacher steps: the gap, rounded up to the next even integer.

    The gap walk moves by -2, 0, +2, so its parity is conserved and it is
    absorbed at 0 (even start) or -1 (odd start).
    """
    if int(gap) != gap or gap < 1:
        raise ArgumentError(f"gap must be a positive integer, got {gap}")
    gap = int(gap)
    return float(gap if gap % 2 == 0 else gap + 1)


class LatticeV:
    """Exact V of the k=2 Rademacher walk as an h-function."""

    flagged = False

    def __call__(self, x: WeylPoint) -> float:
        if x.k != 2:
            raise DimensionError(f"LatticeV is defined for k=2 only, got k={x.k}")
        return exact_lattice_v(x.gaps()[0])

    def rows(self, arr: np.ndarray) -> np.ndarray:
        if arr.shape[1] != 2:
            raise DimensionError(f"LatticeV is defined for k=2 only, got k={arr.shape[1]}")
        gaps = arr[:, 1] - arr[:, 0]
        if np.any(gaps != np.round(gaps)) or np.any(gaps < 1):
            raise ArgumentError("LatticeV needs positive integer gaps")
        return gaps + np.mod(gaps, 2)


def exact_v_estimate(x: WeylPoint) -> VEstimate:
    """exact_lattice_v packaged as a VEstimate with zero error."""
    value = LatticeV()(x)
    return VEstimate(
        v_hat=Estimate.from_mean_stderr(value, 0.0, 1),
        method=VMethod.EXACT_LATTICE,
        horizon=0,
        bias_note=BiasNote.UNBIASED_EXACT,
    )


def check_harmonicity(
    x: WeylPoint,
    law: StepLaw,
    v: HFunction,
    samples: int,
    rng: RngStream,
) -> Estimate:
    """Monte Carlo estimate of E[v(x + S_1); tau_x > 1] - v(x).

    Zero for an invariant function. For v = Delta it is
    -E[Delta(x + S_1); tau_x = 1] > 0, since Delta <= 0 at exit.
    """
    if samples < 2:
        raise ArgumentError(f"need at least 2 samples, got {samples}")
    moved = x.as_array() + law.sample(rng.substream(0, 0).generator(), (samples, x.k))
    inside = np.all(np.diff(moved, axis=1) > 0, axis=1)
    values = np.zeros(samples)
    if inside.any():
        values[inside] = evaluate_rows(v, moved[inside])
    return Estimate.from_samples(values - v(x))


def check_harmonicity_exact(x: WeylPoint, v: HFunction) -> float:
    """E[v(x + S_1); tau_x > 1] - v(x) by enumeration of Rademacher steps."""
    return exact_one_step_defect(x, lambda gaps: v(WeylPoint.from_gaps(gaps, origin=x.coords[0])))
