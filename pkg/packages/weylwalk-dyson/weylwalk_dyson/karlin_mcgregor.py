"""
Killed Brownian motion in W: the Karlin-McGregor transition density and
survival probabilities.

    b_t(y, z) = det[phi_t(z_j - y_i)]_{i,j}
    P(tau^bm_y > t) = int_W b_t(y, z) dz

The survival integral integrates the last coordinate in closed form, which
replaces the last column of the matrix by Phi-bar((z_{k-1} - y_i)/sqrt t),
and runs QUADPACK over the remaining ordered coordinates in units of
sqrt(t): z_1 over R and the gaps over (0, inf).
"""

import logging
import math

import numpy as np
from scipy import integrate, special, stats

from weylwalk_core import Estimate, WeylPoint, vandermonde
from weylwalk_core.errors import ArgumentError, BudgetError
from weylwalk_walks import RngStream

from .constants import constant_K, constant_kappa

logger = logging.getLogger(__name__)

KM_QUADRATURE_MAX_K = 3
DEFAULT_KM_LIMIT = 200
DEFAULT_KM_TOL = 1e-8
DEFAULT_MC_STEPS = 1_000


def _check_time(t: float) -> None:
    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")


def bm_transition_density_b(y: WeylPoint, z: WeylPoint, t: float) -> float:
    """det[phi_t(z_j - y_i)], phi_t the N(0, t) density."""
    _check_time(t)
    if y.k != z.k:
        raise ArgumentError(f"y and z differ in dimension: {y.k} != {z.k}")
    return _transition_det(y.as_array(), z.as_array(), t)


def _transition_det(y: np.ndarray, z: np.ndarray, t: float) -> float:
    diffs = z[None, :] - y[:, None]
    return float(np.linalg.det(stats.norm.pdf(diffs, scale=math.sqrt(t))))


def bm_transition_asymptotic(y: WeylPoint, z: WeylPoint, t: float) -> float:
    """K t^(-k/2) e^{-|z|^2/(2t)} Delta(y) Delta(z) t^(-k(k-1)/2), for |y| << sqrt(t)."""
    _check_time(t)
    k = y.k
    return (
        constant_K(k)
        * t ** (-k / 2)
        * math.exp(-float(np.sum(z.as_array() ** 2)) / (2 * t))
        * vandermonde(y)
        * vandermonde(z)
        * t ** (-k * (k - 1) / 2)
    )


def bm_survival_closed_k2(gap: float, t: float) -> float:
    """P(two Brownian motions gap apart do not meet by t) = erf(gap / (2 sqrt t))."""
    _check_time(t)
    return float(special.erf(gap / (2 * math.sqrt(t))))


def bm_survival_asymptotic(y: WeylPoint, t: float) -> float:
    """kappa Delta(y) t^(-k(k-1)/4)."""
    _check_time(t)
    return constant_kappa(y.k) * vandermonde(y) * t ** (-y.k * (y.k - 1) / 4)


def _km_survival_integrand(u: np.ndarray, y: np.ndarray) -> float:
    # u: ordered z_1 .. z_{k-1} in sqrt(t) units, y likewise scaled
    diffs = u[None, :] - y[:, None]
    matrix = np.column_stack([stats.norm.pdf(diffs), stats.norm.sf(diffs[:, -1])])
    return float(np.linalg.det(matrix))


def _km_quadrature(y: WeylPoint, t: float, limit: int, tol: float) -> Estimate:
    scaled = y.as_array() / math.sqrt(t)

    def integrand(first: float, *gaps: float) -> float:
        u = np.concatenate([[first], first + np.cumsum(gaps)])
        return _km_survival_integrand(u, scaled)

    ranges = [[-np.inf, np.inf]] + [[0.0, np.inf]] * (y.k - 2)
    value, abserr, info = integrate.nquad(
        integrand,
        ranges,
        opts={"limit": limit, "epsabs": 0.0, "epsrel": tol / 10},
        full_output=True,
    )
    if abserr > tol * abs(value) + 1e-15:
        raise BudgetError(
            f"Karlin-McGregor quadrature for y={y.coords}, t={t:g} reached error "
            f"{abserr:.3g} on a value of {value:.3g} within {limit} subdivisions"
        )
    return Estimate.from_mean_stderr(value, abserr, info["neval"])


def _bm_survival_monte_carlo(y: WeylPoint, t: float, samples: int, steps: int, rng: RngStream) -> Estimate:
    gen = rng.generator()
    position = np.tile(y.as_array(), (samples, 1))
    alive = np.ones(samples, dtype=bool)
    scale = math.sqrt(t / steps)
    for _ in range(steps):
        position += scale * gen.standard_normal(position.shape)
        alive &= np.all(np.diff(position, axis=1) > 0, axis=1)
    return Estimate.from_proportion(int(alive.sum()), samples, flags=("discrete_monitoring",))


def bm_survival_km(
    y: WeylPoint,
    t: float,
    limit: int = DEFAULT_KM_LIMIT,
    tol: float = DEFAULT_KM_TOL,
    rng: RngStream | None = None,
    samples: int = 100_000,
    steps: int = DEFAULT_MC_STEPS,
) -> Estimate:
    """P(tau^bm_y > t) for k independent standard Brownian motions.

    k <= 3 uses nested quadrature of the Karlin-McGregor determinant, the
    stderr field then carrying the quadrature error bound. Larger k falls
    back to Monte Carlo over Gaussian paths with `steps` time steps; it
    monitors the ordering at the grid times only, which overstates survival
    by O(steps^-1/2), and is flagged 'discrete_monitoring'.

    Raises:
        BudgetError: quadrature did not reach tol within `limit` subdivisions.
    """
    _check_time(t)
    if y.k <= KM_QUADRATURE_MAX_K:
        return _km_quadrature(y, t, limit, tol)
    if rng is None:
        raise ArgumentError(f"k={y.k} needs Monte Carlo; pass an rng")
    logger.info(f"Brownian survival for k={y.k} by Monte Carlo, {samples} paths x {steps} steps")
    return _bm_survival_monte_carlo(y, t, samples, steps, rng)


def chapman_kolmogorov_k2(
    y: WeylPoint,
    z: WeylPoint,
    s: float,
    t: float,
    limit: int = DEFAULT_KM_LIMIT,
) -> tuple[float, float]:
    """(int_W b_s(y, u) b_t(u, z) du, b_{s+t}(y, z)) for k=2."""
    if y.k != 2 or z.k != 2:
        raise ArgumentError("chapman_kolmogorov_k2 needs k=2 points")
    _check_time(s)
    _check_time(t)
    y_arr, z_arr = y.as_array(), z.as_array()

    def integrand(first: float, gap: float) -> float:
        u = np.array([first, first + gap])
        return _transition_det(y_arr, u, s) * _transition_det(u, z_arr, t)

    lhs, _ = integrate.nquad(
        integrand,
        [[-np.inf, np.inf], [0.0, np.inf]],
        opts={"limit": limit, "epsabs": 1e-14, "epsrel": 1e-10},
    )
    return lhs, bm_transition_density_b(y, z, s + t)
