"""
GUE matrices and eigenvalues.

H = (A + A*)/2 with A of i.i.d. standard complex entries (real and
imaginary parts N(0, 1)) has eigenvalue density proportional to
Delta(x)^2 e^{-|x|^2/2}; sqrt(t) H is the time-t marginal of Dyson
Brownian motion from the origin.
"""

import math

import numpy as np

from weylwalk_core.errors import ArgumentError, DimensionError
from weylwalk_walks import RngStream


def gue_matrices(k: int, samples: int, gen: np.random.Generator, t: float = 1.0) -> np.ndarray:
    """Hermitian matrices of shape (samples, k, k)."""
    if k < 2:
        raise DimensionError(f"k must be >= 2, got {k}")
    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")
    a = gen.standard_normal((samples, k, k)) + 1j * gen.standard_normal((samples, k, k))
    return math.sqrt(t) * (a + np.conj(np.swapaxes(a, 1, 2))) / 2


def gue_eigenvalues(k: int, samples: int, gen: np.random.Generator, t: float = 1.0) -> np.ndarray:
    """Ascending eigenvalues, shape (samples, k)."""
    return np.linalg.eigvalsh(gue_matrices(k, samples, gen, t))


def sample_gue_eigenvalues(k: int, samples: int, rng: RngStream, t: float = 1.0) -> np.ndarray:
    return gue_eigenvalues(k, samples, rng.generator(), t)
