"""
Step laws - centred increment distributions for the coordinate walks.

Every law has mean zero. With `variance_normalized` (the default) samples
are rescaled to unit variance, which is the normalisation every limit
statement in this project assumes.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from weylwalk_core import Estimate
from weylwalk_core.errors import ArgumentError

from .rng import RngStream

logger = logging.getLogger(__name__)


class StepKind(str, Enum):
    """Supported increment distributions."""
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"
    LAPLACE = "laplace"
    SYMMETRIZED_PARETO = "symmetrized_pareto"
    STUDENT_T = "student_t"


class StepLaw(BaseModel):
    """A centred step distribution with declared moment index."""

    model_config = ConfigDict(frozen=True)

    kind: StepKind
    alpha: float | None = None
    """Pareto tail index (symmetrized_pareto only)."""
    nu: float | None = None
    """Degrees of freedom (student_t only)."""
    variance_normalized: bool = True

    @model_validator(mode="after")
    def _check_parameters(self) -> "StepLaw":
        if self.kind is StepKind.SYMMETRIZED_PARETO:
            if self.alpha is None or not self.alpha > 2:
                raise ArgumentError(f"symmetrized_pareto needs alpha > 2, got {self.alpha}")
        elif self.alpha is not None:
            raise ArgumentError(f"alpha only applies to symmetrized_pareto, not {self.kind.value}")
        if self.kind is StepKind.STUDENT_T:
            if self.nu is None or not self.nu > 2:
                raise ArgumentError(f"student_t needs nu > 2, got {self.nu}")
        elif self.nu is not None:
            raise ArgumentError(f"nu only applies to student_t, not {self.kind.value}")
        return self

    @classmethod
    def gaussian(cls) -> "StepLaw":
        return cls(kind=StepKind.GAUSSIAN)

    @classmethod
    def rademacher(cls) -> "StepLaw":
        return cls(kind=StepKind.RADEMACHER)

    @classmethod
    def uniform(cls) -> "StepLaw":
        return cls(kind=StepKind.UNIFORM)

    @classmethod
    def laplace(cls) -> "StepLaw":
        return cls(kind=StepKind.LAPLACE)

    @classmethod
    def symmetrized_pareto(cls, alpha: float) -> "StepLaw":
        return cls(kind=StepKind.SYMMETRIZED_PARETO, alpha=alpha)

    @classmethod
    def student_t(cls, nu: float) -> "StepLaw":
        return cls(kind=StepKind.STUDENT_T, nu=nu)

    @property
    def declared_moment_index(self) -> float:
        """Largest alpha with E|xi|^alpha finite (inf for light-tailed laws)."""
        if self.kind is StepKind.SYMMETRIZED_PARETO:
            return float(self.alpha)
        if self.kind is StepKind.STUDENT_T:
            return float(self.nu)
        return math.inf

    @property
    def tail_index(self) -> float | None:
        """Power of the polynomial tail P(|xi| > u) ~ c u^-index, if any."""
        index = self.declared_moment_index
        return None if math.isinf(index) else index

    @property
    def is_lattice(self) -> bool:
        return self.kind is StepKind.RADEMACHER

    @property
    def raw_variance(self) -> float:
        match self.kind:
            case StepKind.GAUSSIAN | StepKind.RADEMACHER:
                return 1.0
            case StepKind.UNIFORM:
                return 1.0 / 3.0
            case StepKind.LAPLACE:
                return 2.0
            case StepKind.SYMMETRIZED_PARETO:
                a = self.alpha
                return a / ((a - 1.0) ** 2 * (a - 2.0))
            case StepKind.STUDENT_T:
                return self.nu / (self.nu - 2.0)
        raise AssertionError(self.kind)

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.raw_variance) if self.variance_normalized else 1.0

    @property
    def pareto_shift(self) -> float:
        """Scaled Pareto mean m; |xi| > u iff P > m + u/scale on the far tail."""
        if self.kind is not StepKind.SYMMETRIZED_PARETO:
            return 0.0
        return self.scale * self.alpha / (self.alpha - 1.0)

    @property
    def descriptor(self) -> str:
        if self.kind is StepKind.SYMMETRIZED_PARETO:
            base = f"symmetrized_pareto(alpha={self.alpha:g})"
        elif self.kind is StepKind.STUDENT_T:
            base = f"student_t(nu={self.nu:g})"
        else:
            base = self.kind.value
        return base if self.variance_normalized else f"{base}[raw]"

    def sample(self, gen: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
        """Draw i.i.d. increments of the given shape."""
        match self.kind:
            case StepKind.GAUSSIAN:
                raw = gen.standard_normal(size)
            case StepKind.RADEMACHER:
                raw = 2.0 * gen.integers(0, 2, size=size) - 1.0
            case StepKind.UNIFORM:
                raw = gen.uniform(-1.0, 1.0, size)
            case StepKind.LAPLACE:
                raw = gen.laplace(0.0, 1.0, size)
            case StepKind.SYMMETRIZED_PARETO:
                a = self.alpha
                # numpy's pareto is Lomax; +1 gives the classical Pareto on [1, inf)
                pareto = 1.0 + gen.pareto(a, size)
                signs = 2.0 * gen.integers(0, 2, size=size) - 1.0
                raw = signs * (pareto - a / (a - 1.0))
            case StepKind.STUDENT_T:
                raw = gen.standard_t(self.nu, size)
        if self.variance_normalized and self.kind is not StepKind.RADEMACHER:
            raw = raw * self.scale
        return raw


_DESCRIPTOR = re.compile(r"^\s*(?P<kind>[a-z_]+)\s*(\((?P<param>[a-z]+)\s*=\s*(?P<value>[0-9.eE+-]+)\))?\s*(?P<raw>\[raw\])?\s*$")


def parse_law(descriptor: str) -> StepLaw:
    """Inverse of StepLaw.descriptor, e.g. 'symmetrized_pareto(alpha=2.5)'."""
    match = _DESCRIPTOR.match(descriptor)
    if match is None:
        raise ArgumentError(f"cannot parse step law descriptor {descriptor!r}")
    try:
        kind = StepKind(match["kind"])
    except ValueError as e:
        raise ArgumentError(f"unknown step law {match['kind']!r}") from e
    params = {}
    if match["param"]:
        params[match["param"]] = float(match["value"])
    return StepLaw(kind=kind, variance_normalized=match["raw"] is None, **params)


def sample_step(law: StepLaw, rng: RngStream) -> float:
    """One increment drawn from the stream."""
    return float(law.sample(rng.generator(), 1)[0])


@dataclass
class MomentReport:
    """Outcome of a moment self-test."""

    law: str
    mean: Estimate
    variance: Estimate

    def passed(self, n_sigma: float = 3.0, normalized: bool = True) -> bool:
        ok = self.mean.agrees_with(0.0, n_sigma)
        if normalized:
            ok = ok and self.variance.agrees_with(1.0, n_sigma)
        return ok


def moment_self_test(law: StepLaw, rng: RngStream, samples: int = 1_000_000) -> MomentReport:
    """Estimate mean and variance of the law from `samples` draws.

    The variance standard error is only meaningful when E|xi|^4 is finite.
    """
    if samples < 2:
        raise ArgumentError(f"need at least 2 samples, got {samples}")
    draws = law.sample(rng.generator(), samples)
    report = MomentReport(
        law=law.descriptor,
        mean=Estimate.from_samples(draws),
        variance=Estimate.from_samples(draws**2),
    )
    if law.declared_moment_index <= 4:
        logger.warning(
            f"{law.descriptor}: fourth moment is infinite, variance stderr is unreliable"
        )
    return report


def tail_exceedance(samples: np.ndarray, u_grid: np.ndarray) -> np.ndarray:
    """Empirical P(|xi| > u) on a grid."""
    magnitudes = np.sort(np.abs(samples))
    above = magnitudes.size - np.searchsorted(magnitudes, u_grid, side="right")
    return above / magnitudes.size


def empirical_tail_slope(
    law: StepLaw,
    rng: RngStream,
    samples: int = 1_000_000,
    exceedance_range: tuple[float, float] = (1e-2, 1e-4),
    points: int = 12,
) -> float:
    """Log-log slope of P(|xi| > u) over a band of exceedance levels.

    For the symmetrized Pareto the abscissa is shifted by the (scaled)
    Pareto mean, which makes the slope exact on the far tail.
    """
    draws = law.sample(rng.generator(), samples)
    high, low = exceedance_range
    magnitudes = np.abs(draws)
    u_grid = np.quantile(magnitudes, 1.0 - np.geomspace(high, low, points))
    probs = tail_exceedance(draws, u_grid)
    slope, _ = np.polyfit(np.log(u_grid + law.pareto_shift), np.log(probs), 1)
    return float(slope)
