"""
Unit tests for the survival estimators and exact lattice enumeration.
"""

import math

import numpy as np
import pytest
from scipy import stats

from weylwalk_core import WeylPoint
from weylwalk_walks import (
    alive_distribution,
    dyadic_levels,
    exact_exit_expectation,
    exact_expectation_on_survival,
    exact_one_step_defect,
    exact_survival_curve,
    exact_survival_probability,
    gap_moves,
    survival_curve_direct,
    survival_curve_splitting,
    survival_prob_direct,
    survival_prob_splitting,
)


class TestLatticeEnumeration:
    """Exact Rademacher fixtures."""

    def test_gap_moves_k2(self):
        assert dict(gap_moves(2)) == {(-2,): 0.25, (0,): 0.5, (2,): 0.25}

    def test_gap_moves_sum_to_one(self):
        assert sum(p for _, p in gap_moves(4)) == pytest.approx(1.0)

    def test_survival_fixtures(self, gap_two):
        assert exact_survival_probability(gap_two, 1) == 0.75
        assert exact_survival_probability(gap_two, 2) == 0.625

    def test_survival_curve_non_increasing(self, spread_three):
        curve = exact_survival_curve(spread_three, 12)
        assert curve[0] == 1.0
        assert all(b <= a for a, b in zip(curve, curve[1:]))

    def test_limit_expectation_even_gap(self, gap_two):
        assert exact_expectation_on_survival(gap_two, 1) == 2.0
        assert exact_expectation_on_survival(gap_two, 2) == 2.0

    def test_martingale_split(self, spread_three):
        # E[Delta(x+S_tau); tau<=N] + E[Delta(x+S_N); tau>N] = Delta(x)
        total = exact_exit_expectation(spread_three, 6) + exact_expectation_on_survival(spread_three, 6)
        assert total == pytest.approx(16.0, rel=1e-12)

    def test_odd_gap_exit_value(self, gap_one):
        dist = alive_distribution(gap_one, 8)
        assert set(dist.exited) == {(-1,)}

    def test_one_step_defect_of_delta_positive(self, spread_three):
        assert exact_one_step_defect(WeylPoint(coords=(0.0, 1.0, 2.0))) > 0
        assert exact_one_step_defect(spread_three) >= 0

    def test_non_integer_gaps_rejected(self):
        with pytest.raises(ValueError):
            alive_distribution(WeylPoint(coords=(0.0, 1.5)), 2)


class TestDirectSurvival:
    """Direct Monte Carlo survival."""

    def test_lattice_fixtures(self, gap_two, rademacher, rng):
        assert survival_prob_direct(gap_two, rademacher, 1, 100_000, rng).agrees_with(0.75)
        assert survival_prob_direct(gap_two, rademacher, 2, 100_000, rng).agrees_with(0.625)

    def test_curve_is_non_increasing(self, spread_three, gaussian, rng):
        curve = survival_curve_direct(spread_three, gaussian, [1, 4, 16, 64], 10_000, rng)
        values = [est.value for _, est in curve]
        assert values == sorted(values, reverse=True)

    def test_gaussian_reflection(self, gaussian, rng):
        g, n = 40.0, 400
        est = survival_prob_direct(WeylPoint(coords=(0.0, g)), gaussian, n, 20_000, rng)
        target = 2 * stats.norm.cdf(g / math.sqrt(2 * n)) - 1
        assert est.value == pytest.approx(target, rel=0.05)

    def test_rejects_bad_horizons(self, gap_two, rademacher, rng):
        with pytest.raises(ValueError):
            survival_curve_direct(gap_two, rademacher, [4, 2], 10, rng)
        with pytest.raises(ValueError):
            survival_prob_direct(gap_two, rademacher, 2, 0, rng)


class TestSplitting:
    """Fixed-effort multilevel splitting."""

    def test_dyadic_levels(self):
        assert dyadic_levels(4096)[:4] == [1, 2, 4, 8]
        assert dyadic_levels(100)[-2:] == [64, 100]
        assert dyadic_levels(1) == [1]

    def test_single_level_reproduces_direct(self, gap_two, rademacher, rng):
        direct = survival_prob_direct(gap_two, rademacher, 6, 5_000, rng)
        split = survival_prob_splitting(gap_two, rademacher, 6, [6], 5_000, rng)
        assert split == direct

    def test_unbiased_on_lattice(self, gap_two, rademacher, rng):
        values = [
            survival_prob_splitting(gap_two, rademacher, 2, [1, 2], 50, rng.substream(r)).value
            for r in range(200)
        ]
        mean = np.mean(values)
        stderr = np.std(values, ddof=1) / math.sqrt(len(values))
        assert abs(mean - 0.625) < 3 * stderr

    def test_agrees_with_direct(self, spread_three, rademacher, rng):
        direct = survival_prob_direct(spread_three, rademacher, 32, 40_000, rng.substream(1))
        split = survival_prob_splitting(
            spread_three, rademacher, 32, dyadic_levels(32), 2_000, rng.substream(2), replicates=8
        )
        assert abs(split.value - direct.value) < 3 * math.hypot(split.stderr, direct.stderr)

    def test_curve_matches_enumeration(self, spread_three, rademacher, rng):
        curve = survival_curve_splitting(spread_three, rademacher, [2, 4, 8, 16], 2_000, rng, replicates=10)
        exact = exact_survival_curve(spread_three, 16)
        for t, est in curve:
            assert abs(est.value - exact[t]) < 5 * est.stderr + 1e-12

    def test_degenerate_run_flagged(self, rademacher, rng):
        x = WeylPoint(coords=(0.0, 1.0, 2.0, 3.0))
        est = survival_prob_splitting(x, rademacher, 40, [40], 2, rng)
        assert est.value == 0.0
        assert "degenerate" in est.flags

    @pytest.mark.parametrize(
        "n, levels, particles",
        [(4, [2, 3], 10), (4, [2, 2, 4], 10), (4, [0, 4], 10), (4, [4], 1), (4, [], 10)],
    )
    def test_rejects_bad_levels(self, gap_two, rademacher, rng, n, levels, particles):
        with pytest.raises(ValueError):
            survival_prob_splitting(gap_two, rademacher, n, levels, particles, rng)
