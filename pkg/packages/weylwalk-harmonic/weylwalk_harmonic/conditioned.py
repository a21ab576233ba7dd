"""
Conditioned walks: the exact k=2 V-transform chain and brute-force
conditioning on survival.

For k=2 Rademacher steps the gap moves by -2, 0, +2 with probabilities
1/4, 1/2, 1/4, and the V-transform kernel is
P(g -> g') = P(g' - g) V(g')/V(g), with V from exact_lattice_v and
V(g') = 0 for g' <= 0.
"""

import logging
import math
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from scipy import stats

from weylwalk_core import Estimate, WeylPoint
from weylwalk_core.errors import AcceptanceRateError, ArgumentError
from weylwalk_walks import (
    DEFAULT_BLOCK_SIZE,
    RngStream,
    StepLaw,
    block_ranges,
    map_blocks,
)
from weylwalk_walks.runner import block_stream

from .invariant import exact_lattice_v

logger = logging.getLogger(__name__)

MIN_ACCEPTANCE_RATE = 1e-6
MIN_EXPECTED_COUNT = 5.0
_GAP_STEPS = ((-2, 0.25), (0, 0.5), (2, 0.25))


def htransform_kernel_k2(gap: int) -> list[tuple[int, float]]:
    """(next gap, probability) pairs of the exact V-transform chain."""
    v = exact_lattice_v(gap)
    kernel = []
    for step, p in _GAP_STEPS:
        target = gap + step
        if target > 0:
            kernel.append((target, p * exact_lattice_v(target) / v))
    return kernel


def exact_htransform_step_k2(gap: int, rng: RngStream) -> int:
    """One step of the exact V-transform gap chain."""
    kernel = htransform_kernel_k2(gap)
    targets = [g for g, _ in kernel]
    probs = np.array([p for _, p in kernel])
    return int(rng.generator().choice(targets, p=probs / probs.sum()))


def exact_htransform_chain_k2(gap: int, steps: int, rng: RngStream) -> np.ndarray:
    """A path of the V-transform gap chain, gaps at times 0..steps."""
    exact_lattice_v(gap)
    uniforms = rng.generator().random(steps)
    path = np.empty(steps + 1, dtype=np.int64)
    path[0] = gap
    g = gap
    for t, u in enumerate(uniforms, start=1):
        # P(up) = V(g+2)/(4V(g)); P(down) = V(g-2)/(4V(g)), 0 when g-2 <= 0
        v = g + (g & 1)
        up = (v + 2) / (4 * v)
        down = (v - 2) / (4 * v) if g > 2 else 0.0
        if u < up:
            g += 2
        elif u < up + down:
            g -= 2
        path[t] = g
    return path


def exact_htransform_marginal_k2(gap: int, n: int) -> dict[int, float]:
    """Law of the V-transform gap chain at time n."""
    law: dict[int, float] = {int(gap): 1.0}
    for _ in range(n):
        nxt: defaultdict[int, float] = defaultdict(float)
        for g, p in law.items():
            for target, q in htransform_kernel_k2(g):
                nxt[target] += p * q
        law = dict(nxt)
    return law


def total_variation(p: Mapping, q: Mapping) -> float:
    """Total-variation distance of two discrete laws given as dicts."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(key, 0.0) - q.get(key, 0.0)) for key in keys)


def empirical_law(values: np.ndarray, weights: np.ndarray | None = None) -> dict:
    """Normalised (weighted) frequencies of the distinct values."""
    values = np.asarray(values)
    weights = np.ones(values.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    law: defaultdict = defaultdict(float)
    for v, w in zip(values.tolist(), weights.tolist()):
        law[v if not isinstance(v, list) else tuple(v)] += w
    total = sum(law.values())
    return {key: w / total for key, w in law.items()}


@dataclass(frozen=True)
class LawFit:
    """Pearson chi-square of weighted frequencies against a discrete law."""

    statistic: float
    pvalue: float
    cells: int
    sample_size: float

    def passed(self, level: float = 0.01) -> bool:
        return self.pvalue > level


def chisquare_against_law(
    values: np.ndarray,
    weights: np.ndarray | None,
    law: Mapping,
    sample_size: float,
    min_expected: float = MIN_EXPECTED_COUNT,
) -> LawFit:
    """Chi-square of the (weighted) frequencies of `values` against `law`.

    Counts are proportions times `sample_size`, which for correlated
    particles should be an effective sample size, not the particle count.
    Support points with fewer than `min_expected` expected counts share
    one tail cell; mass outside the support of `law` fails the test.
    """
    if sample_size < 1:
        raise ArgumentError(f"sample_size must be >= 1, got {sample_size}")
    observed = empirical_law(values, weights)
    outside = sum(p for key, p in observed.items() if key not in law)
    if outside > 1e-12:
        logger.warning(f"{outside:.3g} of the mass lies outside the support of the reference law")
        return LawFit(statistic=math.inf, pvalue=0.0, cells=len(law), sample_size=sample_size)

    kept = [key for key in sorted(law) if law[key] * sample_size >= min_expected]
    f_obs = [observed.get(key, 0.0) for key in kept]
    f_exp = [law[key] for key in kept]
    tail_obs = max(0.0, 1.0 - sum(f_obs))
    tail_exp = max(0.0, 1.0 - sum(f_exp))
    if tail_exp * sample_size >= min_expected or not kept:
        f_obs.append(tail_obs)
        f_exp.append(tail_exp)
    else:
        f_obs[-1] += tail_obs
        f_exp[-1] += tail_exp
    if len(f_exp) < 2:
        raise ArgumentError("reference law leaves fewer than 2 cells; raise sample_size")
    result = stats.chisquare(sample_size * np.array(f_obs), sample_size * np.array(f_exp))
    return LawFit(
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        cells=len(f_exp),
        sample_size=sample_size,
    )


@dataclass
class SurvivalSample:
    """Accepted path prefixes of walks that survived to time m."""

    prefixes: np.ndarray
    """Positions x + S_1 .. x + S_n, shape (accepted, n, k)."""
    acceptance: Estimate
    n: int
    m: int

    @property
    def accepted(self) -> int:
        return int(self.prefixes.shape[0])

    def endpoints(self) -> np.ndarray:
        return self.prefixes[:, -1, :]


def _survival_block(
    payload: tuple[np.ndarray, StepLaw, int, int, RngStream, int],
) -> np.ndarray:
    start, law, n, m, stream, paths = payload
    gen = stream.generator()
    k = start.size
    position = np.tile(start, (paths, 1))
    prefix = np.empty((paths, n, k))
    alive = np.ones(paths, dtype=bool)
    for t in range(1, m + 1):
        position = position + law.sample(gen, (paths, k))
        alive &= np.all(np.diff(position, axis=1) > 0, axis=1)
        if t <= n:
            prefix[:, t - 1, :] = position
    return prefix[alive]


def sample_conditioned_on_survival(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    m: int,
    samples: int,
    rng: RngStream,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> SurvivalSample:
    """Rejection sampler: simulate to time m, keep the first n steps of survivors.

    Every block draws the same increments whatever m is, so runs with
    different m share random numbers.

    Raises:
        AcceptanceRateError: fewer than 1e-6 of the paths survived.
    """
    if n < 1 or m < n:
        raise ArgumentError(f"need 1 <= n <= m, got n={n}, m={m}")
    if samples < 1:
        raise ArgumentError(f"samples must be >= 1, got {samples}")
    payloads = [
        (x.as_array(), law, n, m, block_stream(rng, b), stop - lo)
        for b, (lo, stop) in enumerate(block_ranges(samples, block_size))
    ]
    prefixes = np.concatenate(map_blocks(_survival_block, payloads, workers))
    accepted = prefixes.shape[0]
    acceptance = Estimate.from_proportion(accepted, samples)
    if accepted == 0 or acceptance.value < MIN_ACCEPTANCE_RATE:
        raise AcceptanceRateError(
            f"acceptance rate {acceptance.value:.3g} below {MIN_ACCEPTANCE_RATE:g} "
            f"for m={m}; use sample_conditioned_paths instead",
            diagnostics={"accepted": accepted, "samples": samples, "m": m, "n": n},
        )
    logger.debug(f"Survival conditioning to m={m}: accepted {accepted}/{samples}")
    return SurvivalSample(prefixes=prefixes, acceptance=acceptance, n=n, m=m)
