"""
Constants of the Brownian survival asymptotics and Gaussian integrals over W.

    K(k)     = (2 pi)^(-k/2) / prod_{l<k} l!
    I(k)     = int_{R^k} |Delta(x)| e^{-|x|^2/2} dx = 2^(3k/2) prod_{j<=k} Gamma(1 + j/2)
    kappa(k) = K(k) I(k) / k!

so that P(tau^bm_y > t) ~ kappa Delta(y) t^(-k(k-1)/4).
"""

import logging
import math
from enum import Enum

import numpy as np
from scipy import integrate, special

from weylwalk_core import Estimate, vandermonde_rows
from weylwalk_core.errors import ArgumentError, DimensionError
from weylwalk_walks import RngStream

logger = logging.getLogger(__name__)

QUADRATURE_MAX_K = 4
DEFAULT_QUAD_LIMIT = 100
DEFAULT_QUAD_TOL = 1e-9


class IntegralMethod(str, Enum):
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


def _check_k(k: int) -> None:
    if int(k) != k or k < 2:
        raise DimensionError(f"k must be an integer >= 2, got {k}")


def constant_K(k: int) -> float:
    _check_k(k)
    return (2 * math.pi) ** (-k / 2) / math.prod(math.factorial(l) for l in range(k))


def mehta_integral(k: int, gamma: float) -> float:
    """int_{R^k} |Delta(x)|^(2 gamma) e^{-|x|^2/2} dx."""
    _check_k(k)
    if not gamma >= 0:
        raise ArgumentError(f"gamma must be non-negative, got {gamma}")
    log_value = (k / 2) * math.log(2 * math.pi) + sum(
        math.lgamma(1 + j * gamma) - math.lgamma(1 + gamma) for j in range(1, k + 1)
    )
    return math.exp(log_value)


def vandermonde_gaussian_integral_closed(k: int) -> float:
    """2^(3k/2) prod_{j=1}^k Gamma(1 + j/2)."""
    _check_k(k)
    return 2 ** (1.5 * k) * math.prod(math.gamma(1 + j / 2) for j in range(1, k + 1))


def constant_kappa(k: int) -> float:
    return constant_K(k) * vandermonde_gaussian_integral_closed(k) / math.factorial(k)


def normalizer_mu(k: int) -> float:
    """Z = int_W Delta(y) e^{-|y|^2/2} dy."""
    return vandermonde_gaussian_integral_closed(k) / math.factorial(k)


def normalizer_delta_squared(k: int) -> float:
    """int_W Delta(y)^2 e^{-|y|^2/2} dy = (2 pi)^(k/2) prod_{j<=k} j! / k!."""
    _check_k(k)
    return (2 * math.pi) ** (k / 2) * math.prod(math.factorial(j) for j in range(1, k + 1)) / math.factorial(k)


def reflection_rate_k2() -> float:
    """Small-gap slope of P(no collision by t) = erf(g / (2 sqrt t)) in g / sqrt(t)."""
    # erf'(0) = 2/sqrt(pi), halved by the argument scaling
    return 0.5 * 2 / math.sqrt(math.pi)


def offsets_from_gaps(gaps: np.ndarray) -> np.ndarray:
    """Points (0, g1, g1 + g2, ...) for gap rows of shape (..., k-1)."""
    gaps = np.asarray(gaps, dtype=float)
    zero = np.zeros(gaps.shape[:-1] + (1,))
    return np.concatenate([zero, np.cumsum(gaps, axis=-1)], axis=-1)


def centred_gaussian_weight(offsets: np.ndarray) -> np.ndarray:
    """int_R e^{-|c + o|^2/2} dc for offset rows o."""
    k = offsets.shape[-1]
    spread = np.sum(offsets**2, axis=-1) - np.sum(offsets, axis=-1) ** 2 / k
    return math.sqrt(2 * math.pi / k) * np.exp(-spread / 2)


def chamber_gaussian_integral(
    k: int,
    beta: float,
    limit: int = DEFAULT_QUAD_LIMIT,
    tol: float = DEFAULT_QUAD_TOL,
) -> Estimate:
    """int_W Delta(y)^beta e^{-|y|^2/2} dy by quadrature over the gaps.

    The stderr field carries QUADPACK's error bound. A result whose bound
    exceeds tol * |value| is returned flagged 'budget_exhausted'.
    """
    _check_k(k)
    if k > QUADRATURE_MAX_K:
        raise ArgumentError(f"quadrature supports k <= {QUADRATURE_MAX_K}, got {k}")

    def integrand(*gaps: float) -> float:
        offsets = offsets_from_gaps(np.array(gaps))[None, :]
        return float(vandermonde_rows(offsets)[0] ** beta * centred_gaussian_weight(offsets)[0])

    value, abserr, info = integrate.nquad(
        integrand,
        [[0.0, np.inf]] * (k - 1),
        opts={"limit": limit, "epsabs": 0.0, "epsrel": tol / 10},
        full_output=True,
    )
    flags = ()
    if abserr > tol * abs(value):
        logger.warning(f"Chamber integral k={k}, beta={beta}: error bound {abserr:.2g} above tolerance")
        flags = ("budget_exhausted",)
    return Estimate.from_mean_stderr(value, abserr, info["neval"], flags)


def gaussian_integral_vandermonde(
    k: int,
    method: IntegralMethod = IntegralMethod.QUADRATURE,
    budget: int = DEFAULT_QUAD_LIMIT,
    rng: RngStream | None = None,
) -> Estimate:
    """int_{R^k} |Delta(x)| e^{-|x|^2/2} dx, the numerical oracle for I(k).

    Args:
        budget: Subdivision limit for quadrature; number of samples for
            Monte Carlo.
        rng: Required for Monte Carlo.
    """
    _check_k(k)
    match IntegralMethod(method):
        case IntegralMethod.QUADRATURE:
            return chamber_gaussian_integral(k, 1.0, limit=budget).scaled(math.factorial(k))
        case IntegralMethod.MONTE_CARLO:
            if rng is None:
                raise ArgumentError("Monte Carlo integration needs an rng")
            if budget < 2:
                raise ArgumentError(f"Monte Carlo budget must be >= 2 samples, got {budget}")
            x = rng.generator().standard_normal((budget, k))
            values = np.abs(vandermonde_rows(x))
            return Estimate.from_samples(values).scaled((2 * math.pi) ** (k / 2))


def log_hermite_envelope(k: int, beta: float) -> float:
    """sup_W [beta log Delta(y) - |y|^2/4], attained at sqrt(2 beta) times the Hermite zeros."""
    _check_k(k)
    zeros, _ = special.roots_hermite(k)
    y = np.sqrt(2 * beta) * np.sort(zeros)
    return float(beta * np.log(vandermonde_rows(y[None, :])[0]) - np.sum(y**2) / 4)
