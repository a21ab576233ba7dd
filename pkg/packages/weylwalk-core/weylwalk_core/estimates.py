"""
Estimate - the Monte Carlo result carrier used by every estimator.
"""

import math
from collections.abc import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import stats

# two-sided 95% normal quantile
Z95 = float(stats.norm.ppf(0.975))


class Estimate(BaseModel):
    """A point estimate with standard error and a 95% normal interval."""

    model_config = ConfigDict(frozen=True)

    value: float
    stderr: float
    n_samples: int
    ci_low: float
    ci_high: float
    flags: tuple[str, ...] = ()
    """Free-form tags such as 'degenerate' or 'truncation_biased'."""

    @model_validator(mode="after")
    def _check_interval(self) -> "Estimate":
        if not self.stderr >= 0:
            raise ValueError(f"stderr must be non-negative, got {self.stderr}")
        if not self.ci_low <= self.value <= self.ci_high:
            raise ValueError(
                f"interval [{self.ci_low}, {self.ci_high}] does not contain {self.value}"
            )
        return self

    @classmethod
    def from_mean_stderr(
        cls,
        value: float,
        stderr: float,
        n_samples: int,
        flags: Iterable[str] = (),
    ) -> "Estimate":
        value = float(value)
        stderr = float(stderr)
        return cls(
            value=value,
            stderr=stderr,
            n_samples=int(n_samples),
            ci_low=value - Z95 * stderr,
            ci_high=value + Z95 * stderr,
            flags=tuple(flags),
        )

    @classmethod
    def from_samples(cls, values: np.ndarray, flags: Iterable[str] = ()) -> "Estimate":
        """Sample mean with the usual s/sqrt(n) standard error."""
        values = np.asarray(values, dtype=float)
        n = values.size
        if n == 0:
            raise ValueError("cannot build an Estimate from zero samples")
        mean = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls.from_mean_stderr(mean, stderr, n, flags)

    @classmethod
    def from_proportion(
        cls, successes: int, n: int, flags: Iterable[str] = ()
    ) -> "Estimate":
        """Bernoulli proportion with binomial standard error."""
        if n <= 0:
            raise ValueError("cannot build a proportion from zero trials")
        p = successes / n
        return cls.from_mean_stderr(p, math.sqrt(p * (1.0 - p) / n), n, flags)

    @property
    def relative_stderr(self) -> float:
        if self.value == 0:
            return math.inf
        return self.stderr / abs(self.value)

    def z_score(self, target: float) -> float:
        """(value - target) / stderr; +-inf when stderr is zero and they differ."""
        diff = self.value - target
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    def agrees_with(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.z_score(target)) <= n_sigma

    def minus(self, other: "Estimate") -> "Estimate":
        """Difference of two independent estimates."""
        return Estimate.from_mean_stderr(
            self.value - other.value,
            math.hypot(self.stderr, other.stderr),
            min(self.n_samples, other.n_samples),
            self.flags + other.flags,
        )

    def scaled(self, factor: float) -> "Estimate":
        return Estimate.from_mean_stderr(
            self.value * factor, self.stderr * abs(factor), self.n_samples, self.flags
        )

    def with_flags(self, *flags: str) -> "Estimate":
        return self.model_copy(update={"flags": self.flags + tuple(flags)})
