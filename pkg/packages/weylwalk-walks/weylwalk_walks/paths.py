"""
Path simulation with every stopping time used in the analysis.

For a start x in W and increments S_n:
- tau: first n >= 1 with x + S_n outside W (ties count as exit)
- T:   first n >= 1 with Delta(x + S_n) <= 0; T >= tau on every path
- nu:  first n >= 1 with x + S_n in W_{N,eps}, N the target horizon
- m_max: max_{i <= N, j} |S_i(j)|

tau is always decided from the ordering, never from the sign of Delta:
two simultaneous inversions leave Delta positive outside W.

A stopping time that did not occur by the horizon is censored, stored as
None in StoppingRecord and as a False `*_observed` flag in StoppingBatch.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from weylwalk_core import RawPoint, WeylPoint
from weylwalk_core.chamber import (
    in_weyl_eps_rows,
    in_weyl_rows,
    separation_threshold,
    vandermonde_rows,
)
from weylwalk_core.errors import ArgumentError

from .laws import StepLaw
from .rng import RngStream
from .runner import DEFAULT_BLOCK_SIZE, block_ranges, block_stream, map_blocks

logger = logging.getLogger(__name__)

DEFAULT_EPS = 0.25


@dataclass(frozen=True)
class StoppingRecord:
    """Per-path summary of one simulated walk."""

    tau: int | None
    """Exit time from W; None means still inside at the horizon."""
    T: int | None
    """First time Delta <= 0; None means censored."""
    nu: int | None
    """First entry into W_{N,eps}; None means censored."""
    m_max: float
    endpoint: RawPoint
    """x + S at min(tau, horizon)."""
    delta_at_stop: float
    delta_at_T: float
    """Delta at min(T, horizon)."""
    horizon: int

    @property
    def survived(self) -> bool:
        return self.tau is None


@dataclass
class StoppingBatch:
    """Column-wise StoppingRecords for a batch of paths."""

    horizon: int
    tau: np.ndarray
    tau_observed: np.ndarray
    T: np.ndarray
    T_observed: np.ndarray
    nu: np.ndarray
    nu_observed: np.ndarray
    m_max: np.ndarray
    endpoint: np.ndarray
    delta_at_stop: np.ndarray
    delta_at_T: np.ndarray
    position_at_horizon: np.ndarray
    delta_at_horizon: np.ndarray

    @property
    def size(self) -> int:
        return int(self.tau.size)

    @property
    def survived(self) -> np.ndarray:
        """tau > horizon."""
        return ~self.tau_observed

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(~self.tau_observed))

    def record(self, i: int) -> StoppingRecord:
        return StoppingRecord(
            tau=int(self.tau[i]) if self.tau_observed[i] else None,
            T=int(self.T[i]) if self.T_observed[i] else None,
            nu=int(self.nu[i]) if self.nu_observed[i] else None,
            m_max=float(self.m_max[i]),
            endpoint=RawPoint.from_array(self.endpoint[i]),
            delta_at_stop=float(self.delta_at_stop[i]),
            delta_at_T=float(self.delta_at_T[i]),
            horizon=self.horizon,
        )

    def records(self) -> list[StoppingRecord]:
        return [self.record(i) for i in range(self.size)]

    @classmethod
    def concatenate(cls, parts: list["StoppingBatch"]) -> "StoppingBatch":
        fields = [
            "tau", "tau_observed", "T", "T_observed", "nu", "nu_observed", "m_max",
            "endpoint", "delta_at_stop", "delta_at_T", "position_at_horizon",
            "delta_at_horizon",
        ]
        return cls(
            horizon=parts[0].horizon,
            **{name: np.concatenate([getattr(p, name) for p in parts]) for name in fields},
        )


def _trace(
    start: np.ndarray,
    increments: Callable[[int], np.ndarray],
    horizon: int,
    threshold: float,
) -> StoppingBatch:
    """Advance every row of `start` for `horizon` steps, recording stopping data."""
    paths, k = start.shape
    displacement = np.zeros_like(start)
    position = start.copy()
    tau = np.zeros(paths, dtype=np.int64)
    T = np.zeros(paths, dtype=np.int64)
    nu = np.zeros(paths, dtype=np.int64)
    tau_seen = np.zeros(paths, dtype=bool)
    T_seen = np.zeros(paths, dtype=bool)
    nu_seen = np.zeros(paths, dtype=bool)
    m_max = np.zeros(paths)
    endpoint = start.copy()
    delta_at_stop = np.zeros(paths)
    delta_at_T = np.zeros(paths)
    delta = vandermonde_rows(start)

    for t in range(1, horizon + 1):
        displacement += increments(t)
        position = start + displacement
        delta = vandermonde_rows(position)

        exits = ~tau_seen & ~in_weyl_rows(position)
        tau[exits] = t
        tau_seen |= exits
        endpoint[exits] = position[exits]
        delta_at_stop[exits] = delta[exits]

        sign_changes = ~T_seen & (delta <= 0)
        T[sign_changes] = t
        T_seen |= sign_changes
        delta_at_T[sign_changes] = delta[sign_changes]

        entries = ~nu_seen & in_weyl_eps_rows(position, threshold)
        nu[entries] = t
        nu_seen |= entries

        np.maximum(m_max, np.abs(displacement).max(axis=1), out=m_max)

    alive = ~tau_seen
    endpoint[alive] = position[alive]
    delta_at_stop[alive] = delta[alive]
    delta_at_T[~T_seen] = delta[~T_seen]

    return StoppingBatch(
        horizon=horizon,
        tau=tau,
        tau_observed=tau_seen,
        T=T,
        T_observed=T_seen,
        nu=nu,
        nu_observed=nu_seen,
        m_max=m_max,
        endpoint=endpoint,
        delta_at_stop=delta_at_stop,
        delta_at_T=delta_at_T,
        position_at_horizon=position,
        delta_at_horizon=delta,
    )


def _validated_start(x: WeylPoint, horizon: int) -> np.ndarray:
    if not isinstance(x, WeylPoint):
        raise ArgumentError(f"start must be a WeylPoint inside W, got {x!r}")
    if horizon < 1:
        raise ArgumentError(f"horizon must be >= 1, got {horizon}")
    return x.as_array()


def trace_path(
    x: WeylPoint,
    steps: np.ndarray,
    eps: float = DEFAULT_EPS,
    scale_n: int | None = None,
) -> StoppingRecord:
    """Stopping data of the single path driven by explicit increments.

    Args:
        x: Start point in W.
        steps: Increments, shape (horizon, k).
        eps: Separation exponent of W_{n,eps}.
        scale_n: Time scale n of W_{n,eps}; defaults to the horizon.
    """
    steps = np.asarray(steps, dtype=float)
    if steps.ndim != 2 or steps.shape[1] != x.k:
        raise ArgumentError(f"steps must have shape (horizon, {x.k}), got {steps.shape}")
    horizon = steps.shape[0]
    start = _validated_start(x, horizon)[None, :]
    threshold = separation_threshold(scale_n or horizon, eps)
    batch = _trace(start, lambda t: steps[t - 1][None, :], horizon, threshold)
    return batch.record(0)


def simulate_until(
    x: WeylPoint,
    law: StepLaw,
    horizon: int,
    eps: float,
    rng: RngStream,
) -> StoppingRecord:
    """Simulate one path to the horizon and summarise its stopping times."""
    _validated_start(x, horizon)
    steps = law.sample(rng.generator(), (horizon, x.k))
    return trace_path(x, steps, eps=eps, scale_n=horizon)


def _simulate_block(
    payload: tuple[np.ndarray, StepLaw, int, float, RngStream, int],
) -> StoppingBatch:
    x, law, horizon, threshold, stream, paths = payload
    gen = stream.generator()
    start = np.tile(x, (paths, 1))
    k = x.size
    return _trace(start, lambda t: law.sample(gen, (paths, k)), horizon, threshold)


def simulate_batch(
    x: WeylPoint,
    law: StepLaw,
    horizon: int,
    n_paths: int,
    rng: RngStream,
    eps: float = DEFAULT_EPS,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> StoppingBatch:
    """Simulate n_paths independent paths; path i lives in block i // block_size."""
    start = _validated_start(x, horizon)
    if n_paths < 1:
        raise ArgumentError(f"n_paths must be >= 1, got {n_paths}")
    threshold = separation_threshold(horizon, eps)
    payloads = [
        (start, law, horizon, threshold, block_stream(rng, b), stop - lo)
        for b, (lo, stop) in enumerate(block_ranges(n_paths, block_size))
    ]
    parts = map_blocks(_simulate_block, payloads, workers)
    batch = StoppingBatch.concatenate(parts)
    logger.debug(
        f"Simulated {n_paths} paths of {law.descriptor} from {x.coords} to n={horizon}: "
        f"survival fraction {1.0 - float(np.mean(batch.tau_observed)):.4g}"
    )
    return batch


class StopRule(str, Enum):
    """Which stopping time the light kernel tracks."""
    TAU = "tau"
    """Exit from W."""
    T = "T"
    """First time Delta <= 0."""


def _still_running(rows: np.ndarray, rule: StopRule) -> np.ndarray:
    if rule is StopRule.TAU:
        return in_weyl_rows(rows)
    return vandermonde_rows(rows) > 0


def exit_times_block(
    start: np.ndarray,
    law: StepLaw,
    steps: int,
    stream: RngStream,
    rule: StopRule = StopRule.TAU,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Light kernel tracking one stopping time; increments are drawn for live paths only.

    Returns:
        (stopping time, stopped, positions); the time is 0 where not stopped
        and a stopped row keeps its position at the stopping time.
    """
    gen = stream.generator()
    position = np.array(start, dtype=float, copy=True)
    paths, k = position.shape
    live = np.arange(paths)
    tau = np.zeros(paths, dtype=np.int64)
    exited = np.zeros(paths, dtype=bool)
    for t in range(1, steps + 1):
        if live.size == 0:
            break
        position[live] += law.sample(gen, (live.size, k))
        inside = _still_running(position[live], rule)
        gone = live[~inside]
        tau[gone] = t
        exited[gone] = True
        live = live[inside]
    return tau, exited, position


def _exit_times_payload(
    payload: tuple[np.ndarray, StepLaw, int, RngStream, StopRule],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return exit_times_block(*payload)


def exit_times(
    start: np.ndarray,
    law: StepLaw,
    steps: int,
    cell: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
    rule: StopRule = StopRule.TAU,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """exit_times_block over many rows, cut into blocks of the cell's streams."""
    payloads = [
        (start[lo:stop], law, steps, block_stream(cell, b), rule)
        for b, (lo, stop) in enumerate(block_ranges(start.shape[0], block_size))
    ]
    parts = map_blocks(_exit_times_payload, payloads, workers)
    tau = np.concatenate([p[0] for p in parts])
    exited = np.concatenate([p[1] for p in parts])
    position = np.concatenate([p[2] for p in parts])
    return tau, exited, position


