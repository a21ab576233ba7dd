"""
V-table: V estimates on a product grid in gap coordinates.

The table interpolates the ratio V/Delta_1 (Delta_1 the perturbed
Vandermonde at t = 1) multilinearly in the adjacent gaps, clipping
queries to the grid, and multiplies back by Delta_1. The ratio is bounded
and flat far from the walls. Beyond `fallback_gap` in every gap the table
returns Delta, which is asymptotically exact there.

A table is filled once, frozen, and then only read.
"""

import itertools
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from weylwalk_core import (
    Estimate,
    WeylPoint,
    perturbed_vandermonde_rows,
    vandermonde_rows,
)
from weylwalk_core.errors import ArgumentError, DataError, DimensionError
from weylwalk_storage import VTableRow, read_vtable, write_vtable
from weylwalk_walks import DEFAULT_BLOCK_SIZE, RngStream, StepLaw

from .invariant import BiasNote, VEstimate, VMethod, estimate_v_stopped

logger = logging.getLogger(__name__)


class VTable:
    """Frozen-after-build table of V estimates, usable as an h-function."""

    def __init__(
        self,
        k: int,
        axes: Sequence[Sequence[float]],
        law: str,
        seed: int,
        fallback_gap: float | None = None,
    ):
        if k < 2:
            raise DimensionError(f"k must be >= 2, got {k}")
        if len(axes) != k - 1:
            raise DimensionError(f"need {k - 1} gap axes for k={k}, got {len(axes)}")
        self.axes = tuple(np.asarray(axis, dtype=float) for axis in axes)
        for axis in self.axes:
            if axis.size < 2 or np.any(axis <= 0) or np.any(np.diff(axis) <= 0):
                raise ArgumentError(f"gap axes need >= 2 positive increasing values, got {axis}")
        self.k = k
        self.law = law
        self.seed = seed
        self.fallback_gap = fallback_gap
        self.entries: dict[tuple[int, ...], VEstimate] = {}
        self._interpolator: RegularGridInterpolator | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.size for axis in self.axes)

    @property
    def frozen(self) -> bool:
        return self._interpolator is not None

    @property
    def flagged(self) -> bool:
        """True if any entry is non-positive."""
        return any(entry.flagged for entry in self.entries.values())

    def grid_gaps(self, index: tuple[int, ...]) -> tuple[float, ...]:
        return tuple(float(axis[i]) for axis, i in zip(self.axes, index))

    def set(self, index: tuple[int, ...], estimate: VEstimate) -> None:
        if self.frozen:
            raise RuntimeError("V-table is frozen")
        if len(index) != self.k - 1 or any(not 0 <= i < n for i, n in zip(index, self.shape)):
            raise ArgumentError(f"grid index {index} outside shape {self.shape}")
        self.entries[tuple(index)] = estimate

    def freeze(self) -> "VTable":
        missing = [i for i in np.ndindex(*self.shape) if i not in self.entries]
        if missing:
            raise DataError(f"V-table has {len(missing)} unfilled grid points, e.g. {missing[0]}")
        if self.flagged:
            logger.warning("V-table contains non-positive entries; h-transform samplers will refuse it")
        ratio = np.empty(self.shape)
        for index, entry in self.entries.items():
            point = WeylPoint.from_gaps(self.grid_gaps(index)).as_array()[None, :]
            ratio[index] = entry.value / perturbed_vandermonde_rows(point, 1.0)[0]
        self._interpolator = RegularGridInterpolator(self.axes, ratio, method="linear")
        return self

    def rows(self, arr: np.ndarray) -> np.ndarray:
        """h on every row of arr."""
        if self._interpolator is None:
            raise RuntimeError("V-table must be frozen before use")
        arr = np.asarray(arr, dtype=float)
        gaps = np.diff(arr, axis=1)
        clipped = np.column_stack(
            [np.clip(gaps[:, j], axis[0], axis[-1]) for j, axis in enumerate(self.axes)]
        )
        values = self._interpolator(clipped) * perturbed_vandermonde_rows(arr, 1.0)
        if self.fallback_gap is not None:
            far = np.all(gaps >= self.fallback_gap, axis=1)
            values[far] = vandermonde_rows(arr[far])
        return values

    def __call__(self, x: WeylPoint) -> float:
        return float(self.rows(x.as_array()[None, :])[0])

    def max_relative_stderr(self) -> float:
        """Largest stderr/|V| over the grid; a floor on the table's own error."""
        return max(entry.v_hat.relative_stderr for entry in self.entries.values())

    @classmethod
    def build(
        cls,
        k: int,
        axes: Sequence[Sequence[float]],
        law: StepLaw,
        horizon: int,
        samples: int,
        rng: RngStream,
        fallback_gap: float | None = None,
        adaptive: bool = True,
        block_size: int = DEFAULT_BLOCK_SIZE,
        workers: int = 1,
    ) -> "VTable":
        """Estimate V at every grid point (stopped estimator) and freeze.

        Grid point with index i draws from rng.substream(*i).
        """
        table = cls(k, axes, law.descriptor, rng.seed, fallback_gap)
        for index in np.ndindex(*table.shape):
            x = WeylPoint.from_gaps(table.grid_gaps(index))
            table.set(
                index,
                estimate_v_stopped(
                    x, law, horizon, samples, rng.substream(*index),
                    adaptive=adaptive, block_size=block_size, workers=workers,
                ),
            )
        logger.info(
            f"Built V-table for {law.descriptor}, k={k}, {len(table.entries)} points; "
            f"max relative stderr {table.max_relative_stderr():.3g}"
        )
        return table.freeze()

    def to_rows(self) -> list[VTableRow]:
        return [
            VTableRow(
                k=self.k,
                gaps=self.grid_gaps(index),
                v_hat=entry.value,
                stderr=entry.v_hat.stderr,
                method=entry.method.value,
                horizon=entry.horizon,
                law=self.law,
                seed=self.seed,
            )
            for index, entry in sorted(self.entries.items())
        ]

    def save(self, path: Path) -> Path:
        write_vtable(path, self.to_rows())
        return path

    @classmethod
    def from_rows(cls, rows: Sequence[VTableRow], fallback_gap: float | None = None) -> "VTable":
        """Rebuild and freeze a table; the rows must cover a full product grid.

        Only value, stderr, method and horizon survive the round trip; the
        bias note is reconstructed from the method.
        """
        if not rows:
            raise DataError("empty V-table")
        k = rows[0].k
        if any(r.k != k for r in rows) or len({r.law for r in rows}) != 1:
            raise DataError("V-table rows mix dimensions or step laws")
        axes = [sorted({r.gaps[j] for r in rows}) for j in range(k - 1)]
        table = cls(k, axes, rows[0].law, rows[0].seed, fallback_gap)
        lookup = [{g: i for i, g in enumerate(axis)} for axis in axes]
        for r in rows:
            index = tuple(lookup[j][g] for j, g in enumerate(r.gaps))
            method = VMethod(r.method)
            table.set(
                index,
                VEstimate(
                    v_hat=Estimate.from_mean_stderr(r.v_hat, r.stderr, 1),
                    method=method,
                    horizon=r.horizon,
                    bias_note=(
                        BiasNote.UNBIASED_EXACT if method is VMethod.EXACT_LATTICE
                        else BiasNote.TRUNCATION_BIASED
                    ),
                ),
            )
        return table.freeze()

    @classmethod
    def load(cls, path: Path, fallback_gap: float | None = None) -> "VTable":
        return cls.from_rows(read_vtable(path), fallback_gap)


def grid_points(axes: Sequence[Sequence[float]]) -> list[WeylPoint]:
    """Every grid point of a gap grid, as points starting at 0."""
    return [WeylPoint.from_gaps(gaps) for gaps in itertools.product(*axes)]
