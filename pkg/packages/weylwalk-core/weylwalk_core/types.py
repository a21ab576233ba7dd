"""
Point types for walks in the Weyl chamber.

A WeylPoint is a validated, strictly increasing k-vector (a state inside
the open chamber W). A RawPoint carries an arbitrary vector, e.g. x + S_n
before ordering has been checked.
"""

import math
from collections.abc import Sequence
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import ArgumentError, DimensionError


class RawPoint(BaseModel):
    """A k-vector of reals with no ordering requirement."""

    model_config = ConfigDict(frozen=True)

    coords: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float] | np.ndarray) -> "RawPoint":
        return cls(coords=tuple(float(v) for v in values))


class WeylPoint(BaseModel):
    """A point of W = {x : x(1) < ... < x(k)}, k >= 2."""

    model_config = ConfigDict(frozen=True)

    coords: tuple[float, ...]

    @field_validator("coords")
    @classmethod
    def _check_chamber(cls, coords: tuple[float, ...]) -> tuple[float, ...]:
        if len(coords) < 2:
            raise DimensionError(f"WeylPoint needs k >= 2 coordinates, got {len(coords)}")
        if not all(math.isfinite(c) for c in coords):
            raise ArgumentError(f"WeylPoint coordinates must be finite: {coords}")
        for left, right in zip(coords, coords[1:]):
            if not left < right:
                raise ArgumentError(f"coordinates are not strictly increasing: {coords}")
        return coords

    @property
    def k(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def gaps(self) -> tuple[float, ...]:
        """Adjacent gaps x(j+1) - x(j)."""
        return tuple(b - a for a, b in zip(self.coords, self.coords[1:]))

    def scaled(self, factor: float) -> "WeylPoint":
        if factor <= 0:
            raise ArgumentError(f"scale factor must be positive, got {factor}")
        return WeylPoint(coords=tuple(factor * c for c in self.coords))

    def to_raw(self) -> RawPoint:
        return RawPoint(coords=self.coords)

    @classmethod
    def from_array(cls, values: Sequence[float] | np.ndarray) -> "WeylPoint":
        return cls(coords=tuple(float(v) for v in values))

    @classmethod
    def from_gaps(cls, gaps: Sequence[float], origin: float = 0.0) -> "WeylPoint":
        """Build (origin, origin + g1, origin + g1 + g2, ...)."""
        coords = [float(origin)]
        for g in gaps:
            coords.append(coords[-1] + float(g))
        return cls(coords=tuple(coords))


class SignedLog(BaseModel):
    """A real number stored as sign and natural log of its magnitude."""

    model_config = ConfigDict(frozen=True)

    sign: Literal[-1, 0, 1]
    log_magnitude: float
    """Arbitrary (conventionally -inf) when sign == 0."""

    def value(self) -> float:
        """Materialise sign * exp(log_magnitude); may overflow to +-inf."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


PointLike = RawPoint | WeylPoint | Sequence[float] | np.ndarray


def as_coords(x: PointLike) -> np.ndarray:
    """Coordinates of any point-like value as a 1-d float array."""
    if isinstance(x, (RawPoint, WeylPoint)):
        return x.as_array()
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d point, got shape {arr.shape}")
    return arr
