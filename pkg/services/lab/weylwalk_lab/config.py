"""
Experiment configuration.

A config file is a flat YAML mapping that declares `schema_version: 1`.
Values are layered with increasing precedence:

    recipe defaults  <  --config file  <  CLI flags

and `workers` finally falls back to WEYLWALK_WORKERS, then 1.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from weylwalk_core import WeylPoint
from weylwalk_core.errors import ArgumentError, DataError
from weylwalk_walks import DEFAULT_BLOCK_SIZE, DEFAULT_EPS, StepLaw, parse_law

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Fields that change where or how fast a run goes, never what it produces
EXECUTION_FIELDS = frozenset({"workers", "out_dir"})


class ExperimentKind(str, Enum):
    TAIL = "tail"
    V_PROPERTIES = "v-properties"
    LIMIT_DIST = "limit-dist"
    DYSON_COMPARE = "dyson-compare"
    HEAVY_TAIL = "heavy-tail"
    CONSTANTS = "constants"


class TailEstimator(str, Enum):
    SPLITTING = "splitting"
    DIRECT = "direct"


class ConditionMode(str, Enum):
    """Target of the particle sampler in limit-dist runs."""

    SURVIVAL = "survival"
    """h = 1: the walk conditioned on tau > n; rescaled endpoints tend to mu."""
    V_TRANSFORM = "v-transform"
    """h = V: the Doob transform; rescaled endpoints tend to the Delta^2 law."""


def axis_counts(size: int, dims: int) -> list[int]:
    """Split size into dims factors, as balanced as possible, largest first."""
    counts = []
    remaining = size
    for d in range(dims, 1, -1):
        target = remaining ** (1.0 / d)
        divisors = [q for q in range(1, remaining + 1) if remaining % q == 0]
        count = min(divisors, key=lambda q: (abs(q - target), q))
        counts.append(count)
        remaining //= count
    counts.append(remaining)
    return sorted(counts, reverse=True)


class ExperimentConfig(BaseModel):
    """One reproducible experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    kind: ExperimentKind
    seed: int = Field(ge=0)
    k: int = Field(default=3, ge=2)
    law: str = "gaussian"
    start: tuple[float, ...] | None = None
    """Starting point; None means (0, 2, 4, ...)."""
    horizons: tuple[int, ...] = (64, 128, 256, 512, 1024, 2048, 4096)
    samples: int = Field(default=100_000, ge=2)
    particles: int = Field(default=16_384, ge=1)
    replicates: int = Field(default=4, ge=1)
    eps: float = Field(default=DEFAULT_EPS, gt=0, lt=0.5)
    out_dir: Path = Path("runs")
    workers: int = Field(default=1, ge=1)
    block_size: int = Field(default=DEFAULT_BLOCK_SIZE, ge=1)

    # tail and heavy-tail
    estimator: TailEstimator = TailEstimator.SPLITTING
    max_relative_stderr: float = Field(default=0.3, gt=0)
    slope_tolerance: float = Field(default=0.15, gt=0)
    constant_tolerance: float = Field(default=0.15, gt=0)
    check_constant: bool = True
    heavy_j: int = Field(default=1, ge=0)

    # V estimates (tail constant, v-properties, v-transform tables)
    v_horizon: int = Field(default=4096, ge=1)
    v_samples: int = Field(default=20_000, ge=2)

    # v-properties
    grid_gaps: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0)
    grid_size: int = Field(default=20, ge=2)
    """Target number of property-grid points, spread over the k-1 gap axes."""
    table_gaps: tuple[float, ...] | None = None
    """Gap axis of V-tables; None means grid_gaps."""
    spacings: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0)

    # limit-dist
    mode: ConditionMode = ConditionMode.SURVIVAL
    fallback_gap: float | None = Field(default=None, gt=0)
    gof_samples: int | None = Field(default=None, ge=1)
    """Resampled endpoints written to endpoints.csv; None means `particles`."""
    record_paths: bool = False

    # dyson-compare
    dt: float = Field(default=1e-3, gt=0)
    dyson_time: float = Field(default=16.0, gt=0)
    dyson_paths: int = Field(default=2_000, ge=1)

    @field_validator("law")
    @classmethod
    def _check_law(cls, law: str) -> str:
        return parse_law(law).descriptor

    @field_validator("horizons")
    @classmethod
    def _check_horizons(cls, horizons: tuple[int, ...]) -> tuple[int, ...]:
        if not horizons:
            raise ArgumentError("horizons must not be empty")
        if horizons[0] < 1:
            raise ArgumentError(f"horizons must be positive, got {horizons}")
        if any(b <= a for a, b in zip(horizons, horizons[1:])):
            raise ArgumentError(f"horizons must be strictly increasing, got {horizons}")
        return horizons

    @field_validator("grid_gaps", "spacings", "table_gaps")
    @classmethod
    def _check_axis(cls, values: tuple[float, ...] | None) -> tuple[float, ...] | None:
        if values is None:
            return values
        if len(values) < 2 or values[0] <= 0 or any(b <= a for a, b in zip(values, values[1:])):
            raise ArgumentError(f"need >= 2 positive increasing values, got {values}")
        return values

    @model_validator(mode="after")
    def _check_start(self) -> "ExperimentConfig":
        if self.start is not None:
            if len(self.start) != self.k:
                raise ArgumentError(f"start has {len(self.start)} coordinates but k = {self.k}")
            WeylPoint(coords=self.start)
        if self.heavy_j > self.k - 1:
            raise ArgumentError(f"heavy_j must be <= k - 1, got {self.heavy_j} for k = {self.k}")
        if self.kind is ExperimentKind.HEAVY_TAIL and self.step_law.tail_index is None:
            raise ArgumentError(f"heavy-tail runs need a law with a polynomial tail, got {self.law}")
        if self.kind is ExperimentKind.LIMIT_DIST and not 2 <= self.replicates <= self.particles:
            raise ArgumentError(
                f"limit-dist needs 2 <= replicates <= particles, got {self.replicates} and {self.particles}"
            )
        if self.kind is ExperimentKind.V_PROPERTIES and min(axis_counts(self.grid_size, self.k - 1)) < 2:
            raise ArgumentError(
                f"grid_size {self.grid_size} cannot be split into k-1 = {self.k - 1} axes of at least 2 values"
            )
        return self

    @property
    def start_point(self) -> WeylPoint:
        if self.start is None:
            return WeylPoint.from_gaps([2.0] * (self.k - 1))
        return WeylPoint(coords=self.start)

    @property
    def step_law(self) -> StepLaw:
        return parse_law(self.law)

    def property_axes(self) -> list[tuple[float, ...]]:
        """Per-gap axes of the property grid, thinned from grid_gaps.

        The product of the axis lengths is grid_size whenever grid_gaps has
        enough values; shorter axes keep every value.
        """
        axes = []
        for count in axis_counts(self.grid_size, self.k - 1):
            values = self.grid_gaps
            if count < len(values):
                picks = np.unique(np.linspace(0, len(values) - 1, count).round().astype(int))
                values = tuple(values[i] for i in picks)
            axes.append(values)
        return axes

    def identity_json(self) -> str:
        """Canonical JSON of everything that determines the results."""
        return self.model_dump_json(exclude=set(EXECUTION_FIELDS))


def read_config_file(path: Path) -> dict[str, Any]:
    """Raw values of a config file, without defaults.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        DataError: If it is not a flat mapping of schema_version 1.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    if not isinstance(raw, dict):
        raise DataError(f"Invalid config in {path}: expected a mapping")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(f"Unsupported schema_version {version!r} in {path}; expected {SCHEMA_VERSION}")
    nested = [key for key, value in raw.items() if isinstance(value, dict)]
    if nested:
        raise DataError(f"Config in {path} must be flat; nested keys: {nested}")
    return raw


def load_config(path: Path) -> ExperimentConfig:
    return ExperimentConfig.model_validate(read_config_file(path))


def dump_config(config: ExperimentConfig, path: Path) -> Path:
    """Write `config` so that load_config(path) == config."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config.model_dump(mode="json"), f, sort_keys=False)
    return path


def build_config(
    recipe_defaults: dict[str, Any] | None = None,
    file_values: dict[str, Any] | None = None,
    overrides: dict[str, Any] | None = None,
    env_workers: int | None = None,
) -> ExperimentConfig:
    """Layer the configuration sources and validate the result.

    None-valued overrides are ignored, so unset CLI flags never mask a
    lower layer.
    """
    merged: dict[str, Any] = {}
    for layer in (recipe_defaults, file_values):
        merged.update(layer or {})
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    if "workers" not in merged and env_workers is not None:
        merged["workers"] = env_workers
    config = ExperimentConfig.model_validate(merged)
    logger.debug(f"Resolved config: {config.model_dump(mode='json')}")
    return config
