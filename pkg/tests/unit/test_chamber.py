"""
Unit tests for chamber types and Vandermonde evaluation.
"""

import math

import numpy as np
import pytest

from weylwalk_core import (
    RawPoint,
    SignedLog,
    WeylPoint,
    in_weyl,
    in_weyl_eps,
    in_weyl_rows,
    perturbed_vandermonde,
    vandermonde,
    vandermonde_rows,
    vandermonde_signed_log,
)
from weylwalk_core.chamber import DIRECT_PRODUCT_MAX_K
from weylwalk_core.errors import ArgumentError, DimensionError


class TestWeylPoint:
    """Tests for the validated chamber point."""

    def test_accepts_increasing(self):
        x = WeylPoint(coords=(0.0, 1.0, 3.0))
        assert x.k == 3
        assert x.gaps() == (1.0, 2.0)

    def test_rejects_tie(self):
        with pytest.raises(ValueError):
            WeylPoint(coords=(0.0, 0.0, 1.0))

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            WeylPoint(coords=(1.0, 0.0))

    def test_rejects_single_coordinate(self):
        with pytest.raises(ValueError):
            WeylPoint(coords=(1.0,))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            WeylPoint(coords=(0.0, math.inf))

    def test_frozen(self):
        x = WeylPoint(coords=(0.0, 1.0))
        with pytest.raises(Exception):
            x.coords = (0.0, 2.0)

    def test_from_gaps(self):
        assert WeylPoint.from_gaps([2, 3], origin=1).coords == (1.0, 3.0, 6.0)

    def test_raw_point_allows_any_order(self):
        assert RawPoint(coords=(3.0, 1.0, 1.0)).k == 3


class TestVandermonde:
    """Tests for Delta and its signed-log form."""

    @pytest.mark.parametrize(
        "coords, expected",
        [((0, 1), 1.0), ((0, 1, 2), 2.0), ((1, 0, 2), -2.0), ((0, 0, 1), 0.0)],
    )
    def test_small_values(self, coords, expected):
        assert vandermonde(coords) == expected

    def test_too_few_coordinates(self):
        with pytest.raises(DimensionError):
            vandermonde([1.0])

    def test_signed_log_small(self):
        result = vandermonde_signed_log((0, 1, 2))
        assert result.sign == 1
        assert result.log_magnitude == pytest.approx(math.log(2.0))

    def test_signed_log_tie(self):
        assert vandermonde_signed_log((0, 0, 1)).sign == 0

    def test_signed_log_four_points(self):
        result = vandermonde_signed_log((0, 10, 20, 30))
        assert result.sign == 1
        assert result.log_magnitude == pytest.approx(math.log(1.2e7), rel=1e-12)

    def test_signed_log_value(self):
        assert SignedLog(sign=-1, log_magnitude=0.0).value() == -1.0
        assert SignedLog(sign=0, log_magnitude=-math.inf).value() == 0.0

    def test_antisymmetry(self):
        gen = np.random.default_rng(1)
        for _ in range(50):
            x = gen.normal(size=5)
            y = x.copy()
            y[[1, 3]] = y[[3, 1]]
            assert vandermonde(y) == pytest.approx(-vandermonde(x), rel=1e-12)

    def test_translation_invariance(self):
        x = np.array([0.3, 1.1, 2.7, 4.0])
        for c in (-1e3, -1.5, 17.0, 1e3):
            assert vandermonde(x + c) == pytest.approx(vandermonde(x), rel=1e-10)

    def test_scaling(self):
        x = np.array([0.3, 1.1, 2.7, 4.0])
        k = x.size
        assert vandermonde(2.5 * x) == pytest.approx(2.5 ** (k * (k - 1) / 2) * vandermonde(x), rel=1e-8)

    def test_signed_log_consistency_above_direct_threshold(self):
        x = np.arange(DIRECT_PRODUCT_MAX_K + 2, dtype=float) * 1.7
        diffs = [x[j] - x[i] for i in range(x.size) for j in range(i + 1, x.size)]
        assert vandermonde(x) == pytest.approx(math.prod(diffs), rel=1e-10)

    def test_rows_match_scalar(self):
        arr = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 2.0], [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(vandermonde_rows(arr), [2.0, -2.0, 0.0])


class TestPerturbedVandermonde:
    """Tests for Delta_t."""

    def test_reduces_to_abs_delta(self):
        assert perturbed_vandermonde((0, 1, 2), 0.0) == 2.0
        assert perturbed_vandermonde((1, 0, 2), 0.0) == pytest.approx(abs(vandermonde((1, 0, 2))), rel=1e-12)

    def test_shifted(self):
        assert perturbed_vandermonde((0, 1, 2), 1.0) == 12.0

    def test_tie(self):
        assert perturbed_vandermonde((0, 0), 1.0) == 1.0

    def test_negative_t(self):
        with pytest.raises(ArgumentError):
            perturbed_vandermonde((0, 1), -0.1)

    def test_monotone_in_t(self):
        x = (0.0, 0.4, 2.0, 2.1)
        values = [perturbed_vandermonde(x, t) for t in (0.0, 0.5, 1.0, 3.0)]
        assert values == sorted(values)


class TestChamberPredicates:
    """Tests for W and W_{n,eps} membership."""

    @pytest.mark.parametrize(
        "coords, expected",
        [((0, 1, 2), True), ((0, 0, 1), False), ((1, 0), False)],
    )
    def test_in_weyl(self, coords, expected):
        assert in_weyl(coords) is expected

    def test_in_weyl_rows(self):
        arr = np.array([[0.0, 1.0], [1.0, 1.0], [2.0, 1.0]])
        assert in_weyl_rows(arr).tolist() == [True, False, False]

    def test_eps_membership(self):
        assert in_weyl_eps((0, 10), 16, 0.25)
        assert not in_weyl_eps((0, 1), 16, 0.25)

    def test_eps_boundary_is_outside(self):
        assert not in_weyl_eps((0, 3, 6), 81, 0.25)

    def test_eps_ignores_order(self):
        assert in_weyl_eps((10, 0), 16, 0.25)

    @pytest.mark.parametrize("eps", [0.0, 0.5, -0.1])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(ArgumentError):
            in_weyl_eps((0, 10), 16, eps)
