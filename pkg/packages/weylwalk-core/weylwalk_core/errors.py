"""
Error types shared across weylwalk packages.

Each error also subclasses the builtin it refines, so callers that only
care about "bad input" vs "run failed" can keep catching ValueError and
RuntimeError.
"""

from typing import Any


class WeylwalkError(Exception):
    """Base class for all weylwalk errors."""


class DimensionError(WeylwalkError, ValueError):
    """A point has fewer than two coordinates or the wrong length."""


class ArgumentError(WeylwalkError, ValueError):
    """A parameter is outside its admissible range."""


class DataError(WeylwalkError, ValueError):
    """Statistical input is unusable (too few points, non-positive values)."""


class DegenerateRunError(WeylwalkError, RuntimeError):
    """A particle population died out or a sampler starved."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class AcceptanceRateError(DegenerateRunError):
    """Rejection sampling accepted too few proposals to be usable."""


class BudgetError(WeylwalkError, RuntimeError):
    """A numerical integration did not reach its tolerance within budget."""


class IntegrationError(WeylwalkError, RuntimeError):
    """An SDE path hit the gap floor after the maximum sub-step depth."""


class EnvelopeError(WeylwalkError, RuntimeError):
    """A rejection envelope was exceeded; the sampler must be recalibrated."""
