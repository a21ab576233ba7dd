"""
Dyson Brownian motion by Euler-Maruyama with per-path step control.

    dX_i = sum_{j != i} 1/(X_i - X_j) dt + dB_i

Each path takes steps of at most min(dt, safety * min gap^2). A step that
would leave W (or come closer than the gap floor) is redrawn at half the
size; a path that needs more than max_depth halvings in a row is failed,
never reflected. Paths are vectorised per block; block b draws from
rng.substream(0, b) so results do not depend on the worker count.
"""

import logging
from dataclasses import dataclass

import numpy as np

from weylwalk_core import WeylPoint
from weylwalk_core.errors import ArgumentError, IntegrationError
from weylwalk_walks import DEFAULT_BLOCK_SIZE, RngStream, block_ranges, map_blocks
from weylwalk_walks.runner import block_stream

from .gue import gue_eigenvalues

logger = logging.getLogger(__name__)

GAP_FLOOR = 1e-9
MAX_DEPTH = 40
DEFAULT_SAFETY = 0.01


def dyson_drift_rows(arr: np.ndarray) -> np.ndarray:
    """sum_{j != i} 1/(x_i - x_j) for every row."""
    diffs = arr[:, :, None] - arr[:, None, :]
    k = arr.shape[1]
    diag = np.arange(k)
    diffs[:, diag, diag] = np.inf
    return np.sum(1.0 / diffs, axis=2)


def _min_gap(arr: np.ndarray) -> np.ndarray:
    return np.min(np.diff(arr, axis=1), axis=1)


@dataclass
class DysonBatch:
    """Positions at the grid times of the paths that completed."""

    t_grid: np.ndarray
    positions: np.ndarray
    """Shape (completed, len(t_grid), k)."""
    failed: int
    halvings: int

    @property
    def completed(self) -> int:
        return int(self.positions.shape[0])

    def at(self, index: int) -> np.ndarray:
        return self.positions[:, index, :]


def _check_grid(t_grid: np.ndarray, origin: bool) -> None:
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ArgumentError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0:
        raise ArgumentError(f"t_grid must be non-negative and strictly increasing: {t_grid}")
    if origin and t_grid[0] <= 0:
        raise ArgumentError("the origin entrance needs a positive first grid time")


def _dyson_block(
    payload: tuple[np.ndarray | None, int, np.ndarray, float, float, RngStream, int],
) -> tuple[np.ndarray, np.ndarray, int]:
    start, k, t_grid, dt, safety, stream, paths = payload
    gen = stream.generator()
    out = np.empty((paths, t_grid.size, k))
    failed = np.zeros(paths, dtype=bool)
    halvings = 0
    if start is None:
        position = gue_eigenvalues(k, paths, gen, float(t_grid[0]))
        time = np.full(paths, float(t_grid[0]))
    else:
        position = np.tile(start, (paths, 1))
        time = np.zeros(paths)
    step = np.minimum(dt, safety * _min_gap(position) ** 2)
    depth = np.zeros(paths, dtype=np.int64)

    for g, target in enumerate(t_grid):
        while True:
            active = np.flatnonzero(~failed & (time < target))
            if active.size == 0:
                break
            x = position[active]
            remaining = target - time[active]
            h = np.minimum(step[active], remaining)
            proposal = x + dyson_drift_rows(x) * h[:, None] + np.sqrt(h)[:, None] * gen.standard_normal(x.shape)
            ok = _min_gap(proposal) > GAP_FLOOR

            moved = active[ok]
            position[moved] = proposal[ok]
            finishing = h[ok] >= remaining[ok]
            time[moved] = np.where(finishing, target, time[moved] + h[ok])
            step[moved] = np.minimum(dt, safety * _min_gap(proposal[ok]) ** 2)
            depth[moved] = 0

            retry = active[~ok]
            step[retry] = h[~ok] / 2
            depth[retry] += 1
            halvings += retry.size
            failed[retry[depth[retry] > MAX_DEPTH]] = True
        out[:, g, :] = position
    return out[~failed], failed, halvings


def simulate_dyson_batch(
    start: WeylPoint | None,
    t_grid: np.ndarray | list[float],
    dt: float,
    paths: int,
    rng: RngStream,
    k: int | None = None,
    safety: float = DEFAULT_SAFETY,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> DysonBatch:
    """Simulate `paths` Dyson paths and record them at the grid times.

    Args:
        start: Starting point in W, or None for the origin entrance, whose
            time-t_grid[0] marginal is drawn from GUE; k is then required.
        dt: Largest step size.
        safety: Steps never exceed safety * (min gap)^2.

    Failed paths (gap floor reached after MAX_DEPTH halvings) are dropped
    and counted.
    """
    grid = np.asarray(t_grid, dtype=float)
    _check_grid(grid, start is None)
    if start is None and k is None:
        raise ArgumentError("k is required for the origin entrance")
    if not dt > 0 or not safety > 0:
        raise ArgumentError(f"dt and safety must be positive, got {dt}, {safety}")
    if paths < 1:
        raise ArgumentError(f"paths must be >= 1, got {paths}")
    dim = start.k if start is not None else int(k)
    start_arr = start.as_array() if start is not None else None
    payloads = [
        (start_arr, dim, grid, dt, safety, block_stream(rng, b), stop - lo)
        for b, (lo, stop) in enumerate(block_ranges(paths, block_size))
    ]
    results = map_blocks(_dyson_block, payloads, workers)
    positions = np.concatenate([r[0] for r in results])
    failed = int(sum(r[1].sum() for r in results))
    halvings = int(sum(r[2] for r in results))
    if failed:
        logger.warning(f"Dyson integrator discarded {failed}/{paths} paths at the gap floor")
    logger.debug(f"Dyson batch: {paths} paths, {halvings} step halvings")
    return DysonBatch(t_grid=grid, positions=positions, failed=failed, halvings=halvings)


def simulate_dyson(
    start: WeylPoint | None,
    t_grid: np.ndarray | list[float],
    dt: float,
    rng: RngStream,
    k: int | None = None,
    safety: float = DEFAULT_SAFETY,
) -> np.ndarray:
    """One Dyson path at the grid times, shape (len(t_grid), k).

    Raises:
        IntegrationError: the path hit the gap floor after MAX_DEPTH halvings.
    """
    batch = simulate_dyson_batch(start, t_grid, dt, 1, rng, k=k, safety=safety)
    if batch.completed == 0:
        raise IntegrationError(
            f"gap fell below {GAP_FLOOR:g} after {MAX_DEPTH} step halvings; run discarded"
        )
    return batch.positions[0]
