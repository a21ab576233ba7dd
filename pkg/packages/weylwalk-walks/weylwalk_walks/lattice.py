"""
Exact enumeration for Rademacher walks.

Every coordinate moves by +-1 independently, so the adjacent gaps move by
-2, 0 or +2 and membership in W, Delta and the exit values depend on the
gap vector alone. The distribution of the gap vector is propagated step by
step, splitting off the mass that leaves W (gap <= 0) at each step.

Enumeration cost grows like n^(k-1); these are oracles for small k and
small horizons.
"""

import logging
from collections import Counter, defaultdict
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from weylwalk_core import WeylPoint, vandermonde
from weylwalk_core.errors import ArgumentError

logger = logging.getLogger(__name__)

Gaps = tuple[int, ...]
GapFunction = Callable[[Gaps], float]


@lru_cache(maxsize=8)
def gap_moves(k: int) -> tuple[tuple[Gaps, float], ...]:
    """Gap increments of one Rademacher step with their probabilities."""
    if k < 2:
        raise ArgumentError(f"k must be >= 2, got {k}")
    counts = Counter(
        tuple(b - a for a, b in zip(step, step[1:])) for step in product((-1, 1), repeat=k)
    )
    total = 2**k
    return tuple((move, count / total) for move, count in sorted(counts.items()))


def lattice_gaps(x: WeylPoint) -> Gaps:
    """Integer gap vector of x; raises if a gap is not an integer."""
    gaps = x.gaps()
    if not all(float(g).is_integer() for g in gaps):
        raise ArgumentError(f"lattice enumeration needs integer gaps, got {gaps}")
    return tuple(int(g) for g in gaps)


def delta_of_gaps(gaps: Gaps) -> float:
    """Vandermonde product of any point with these adjacent gaps."""
    return vandermonde(np.concatenate(([0.0], np.cumsum(gaps, dtype=float))))


def _inside(gaps: Gaps) -> bool:
    return all(g > 0 for g in gaps)


@dataclass(frozen=True)
class LatticeDistribution:
    """Law of the gap walk up to a horizon."""

    k: int
    horizon: int
    alive: dict[Gaps, float]
    """Sub-probability law of the gaps at the horizon on {tau > horizon}."""
    exited: dict[Gaps, float]
    """Law of the gaps at tau on {tau <= horizon}."""
    survival: tuple[float, ...]
    """P(tau > t) for t = 0..horizon."""

    def expectation_on_survival(self, f: GapFunction = delta_of_gaps) -> float:
        return sum(p * f(g) for g, p in self.alive.items())

    def exit_expectation(self, f: GapFunction = delta_of_gaps) -> float:
        return sum(p * f(g) for g, p in self.exited.items())


@lru_cache(maxsize=64)
def _propagate(start: Gaps, horizon: int) -> LatticeDistribution:
    k = len(start) + 1
    moves = gap_moves(k)
    alive: dict[Gaps, float] = {start: 1.0}
    exited: defaultdict[Gaps, float] = defaultdict(float)
    survival = [1.0]
    for _ in range(horizon):
        nxt: defaultdict[Gaps, float] = defaultdict(float)
        for gaps, p in alive.items():
            for move, q in moves:
                target = tuple(g + d for g, d in zip(gaps, move))
                if _inside(target):
                    nxt[target] += p * q
                else:
                    exited[target] += p * q
        alive = dict(nxt)
        survival.append(sum(alive.values()))
    logger.debug(
        f"Enumerated gap walk from {start} to n={horizon}: {len(alive)} live states"
    )
    return LatticeDistribution(
        k=k, horizon=horizon, alive=alive, exited=dict(exited), survival=tuple(survival)
    )


def alive_distribution(x: WeylPoint, n: int) -> LatticeDistribution:
    """Exact law of the Rademacher gap walk started at x, up to time n."""
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    return _propagate(lattice_gaps(x), n)


def exact_survival_probability(x: WeylPoint, n: int) -> float:
    """P(tau_x > n) for the Rademacher walk."""
    return alive_distribution(x, n).survival[-1]


def exact_survival_curve(x: WeylPoint, n: int) -> list[float]:
    return list(alive_distribution(x, n).survival)


def exact_expectation_on_survival(
    x: WeylPoint, n: int, f: GapFunction = delta_of_gaps
) -> float:
    """E[f(x + S_n); tau_x > n]; f defaults to Delta."""
    return alive_distribution(x, n).expectation_on_survival(f)


def exact_exit_expectation(x: WeylPoint, n: int, f: GapFunction = delta_of_gaps) -> float:
    """E[f(x + S_tau); tau_x <= n]; f defaults to Delta."""
    return alive_distribution(x, n).exit_expectation(f)


def exact_one_step_defect(x: WeylPoint, f: GapFunction = delta_of_gaps) -> float:
    """E[f(x + S_1); tau_x > 1] - f(x)."""
    gaps = lattice_gaps(x)
    return alive_distribution(x, 1).expectation_on_survival(f) - f(gaps)
