"""
Block runner - fans independent blocks of paths out to worker processes.

Work is cut into fixed-size blocks by path index. Block b of a cell draws
from `cell.substream(0, b)` and results are gathered in block order, so
every aggregate is independent of the worker count.
"""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any, TypeVar

from weylwalk_core.errors import ArgumentError

from .rng import RngStream

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 4096

T = TypeVar("T")


def block_ranges(n_items: int, block_size: int = DEFAULT_BLOCK_SIZE) -> list[tuple[int, int]]:
    """Half-open [start, stop) index ranges covering n_items."""
    if block_size < 1:
        raise ArgumentError(f"block_size must be positive, got {block_size}")
    return [(start, min(start + block_size, n_items)) for start in range(0, n_items, block_size)]


def block_stream(cell: RngStream, block_index: int) -> RngStream:
    return cell.substream(0, block_index)


def auxiliary_stream(cell: RngStream) -> RngStream:
    """Stream for per-cell work that is not path simulation (e.g. resampling)."""
    return cell.substream(1)


def map_blocks(fn: Callable[[Any], T], payloads: Sequence[Any], workers: int = 1) -> list[T]:
    """Apply fn to every payload, preserving order.

    fn and payloads must be picklable when workers > 1.
    """
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    pool_size = min(workers, len(payloads))
    logger.debug(f"Dispatching {len(payloads)} blocks to {pool_size} worker processes")
    with ProcessPoolExecutor(max_workers=pool_size) as pool:
        return list(pool.map(fn, payloads))


def compensated_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum; the reduction order never changes the result."""
    return math.fsum(values)
