"""
Unit tests for the Estimate result carrier.
"""

import math

import numpy as np
import pytest

from weylwalk_core import Estimate
from weylwalk_core.estimates import Z95


class TestEstimate:
    """Tests for Estimate construction and arithmetic."""

    def test_interval_is_normal(self):
        est = Estimate.from_mean_stderr(1.0, 0.1, 100)
        assert est.ci_low == pytest.approx(1.0 - Z95 * 0.1)
        assert est.ci_high == pytest.approx(1.0 + Z95 * 0.1)

    def test_negative_stderr_rejected(self):
        with pytest.raises(ValueError):
            Estimate.from_mean_stderr(1.0, -0.1, 10)

    def test_interval_must_contain_value(self):
        with pytest.raises(ValueError):
            Estimate(value=1.0, stderr=0.1, n_samples=1, ci_low=1.5, ci_high=2.0)

    def test_from_samples(self):
        values = np.array([1.0, 2.0, 3.0, 4.0])
        est = Estimate.from_samples(values)
        assert est.value == 2.5
        assert est.stderr == pytest.approx(np.std(values, ddof=1) / 2.0)
        assert est.n_samples == 4

    def test_from_samples_empty(self):
        with pytest.raises(ValueError):
            Estimate.from_samples(np.array([]))

    def test_from_proportion(self):
        est = Estimate.from_proportion(75, 100)
        assert est.value == 0.75
        assert est.stderr == pytest.approx(math.sqrt(0.75 * 0.25 / 100))

    def test_exact_agreement_with_zero_stderr(self):
        est = Estimate.from_mean_stderr(2.0, 0.0, 1)
        assert est.agrees_with(2.0)
        assert not est.agrees_with(2.0001)

    def test_minus_combines_errors(self):
        a = Estimate.from_mean_stderr(3.0, 0.3, 10)
        b = Estimate.from_mean_stderr(1.0, 0.4, 20, flags=("x",))
        diff = a.minus(b)
        assert diff.value == 2.0
        assert diff.stderr == pytest.approx(0.5)
        assert diff.flags == ("x",)

    def test_scaled_and_flags(self):
        est = Estimate.from_mean_stderr(2.0, 0.5, 4).scaled(-2.0).with_flags("degenerate")
        assert est.value == -4.0
        assert est.stderr == 1.0
        assert "degenerate" in est.flags

    def test_relative_stderr(self):
        assert Estimate.from_mean_stderr(2.0, 0.5, 4).relative_stderr == 0.25
        assert math.isinf(Estimate.from_mean_stderr(0.0, 0.5, 4).relative_stderr)
