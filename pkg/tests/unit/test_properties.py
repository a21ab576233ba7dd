"""
Unit tests for the V property checks.
"""

import pytest

from weylwalk_core import WeylPoint
from weylwalk_harmonic import (
    PropertyCheck,
    all_passed,
    calibrate_bound_constant,
    check_asymptotic_ratio,
    check_bound,
    check_martingale_split,
    check_monotonicity,
    check_overshoot,
    check_positivity,
    check_vT_lower_bound,
    check_vT_submartingale,
    dominates,
    martingale_split,
    overshoot_ratio,
)


class TestDominance:
    def test_gapwise_order(self):
        assert dominates(WeylPoint.from_gaps([1, 2]), WeylPoint.from_gaps([1, 3]))
        assert not dominates(WeylPoint.from_gaps([1, 2]), WeylPoint.from_gaps([2, 1]))

    def test_dimension_mismatch(self):
        assert not dominates(WeylPoint.from_gaps([1]), WeylPoint.from_gaps([1, 1]))


class TestVProperties:
    """Monotonicity, bounds, asymptotics and positivity of V."""

    def test_monotone_on_lattice(self, gap_two, rademacher, rng):
        check = check_monotonicity([(gap_two, WeylPoint.from_gaps([4]))], rademacher, 64, 2_000, rng)
        assert check.passed
        assert check.name == "monotone"

    def test_monotone_rejects_unordered_pairs(self, gap_two, gap_one, rademacher, rng):
        with pytest.raises(ValueError):
            check_monotonicity([(gap_two, gap_one)], rademacher, 8, 100, rng)

    def test_bound_with_calibrated_constant(self, gaussian, rng):
        points = [WeylPoint.from_gaps(g) for g in ([1, 1], [1, 4], [4, 4])]
        c = calibrate_bound_constant(points, gaussian, 32, 1_000, rng)
        check = check_bound(points, c, gaussian, 32, 1_000, rng)
        assert c > 0
        assert check.passed

    def test_asymptotic_ratio(self, gaussian, rng):
        check = check_asymptotic_ratio(2, [5.0, 20.0, 60.0], gaussian, 100, 2_000, rng)
        assert check.passed
        assert len(check.values["ratios"]) == 3

    def test_positivity(self, spread_three, gaussian, rng):
        check = check_positivity([spread_three, WeylPoint.from_gaps([1, 1])], gaussian, 16, 2_000, rng)
        assert check.passed


class TestMartingaleDiagnostics:
    """Identities and inequalities for Delta along the walk."""

    def test_martingale_split_sums_to_delta(self, spread_three, gaussian, rng):
        exit_part, _, total = martingale_split(spread_three, gaussian, 8, 20_000, rng)
        assert exit_part.value <= 0
        assert total.agrees_with(16.0)

    def test_martingale_split_check(self, spread_three, gaussian, rng):
        assert check_martingale_split(spread_three, gaussian, 8, 20_000, rng).passed

    def test_vT_submartingale(self, spread_three, gaussian, rng):
        check = check_vT_submartingale(spread_three, gaussian, [1, 2, 4, 8], 5_000, rng)
        assert check.passed
        assert [row[0] for row in check.values["curve"]] == [1, 2, 4, 8]

    def test_vT_lower_bound(self, spread_three, gaussian, rng):
        assert check_vT_lower_bound(spread_three, gaussian, 8, 5_000, rng).passed

    def test_sign_change_overshoot_small_far_from_walls(self, gaussian, rng):
        x = WeylPoint.from_gaps([20.0, 20.0])
        ratio = overshoot_ratio(x, gaussian, 16, 5_000, rng)
        assert ratio.value <= 0
        assert check_overshoot(x, gaussian, 16, 5_000, rng).passed


class TestPropertyCheck:
    def test_row_shape(self):
        check = PropertyCheck(name="positive", passed=True, detail="ok")
        assert check.as_row() == {"property": "positive", "passed": True, "detail": "ok"}

    def test_all_passed(self):
        good = PropertyCheck(name="a", passed=True, detail="")
        bad = PropertyCheck(name="b", passed=False, detail="")
        assert all_passed([good, good])
        assert not all_passed([good, bad])
