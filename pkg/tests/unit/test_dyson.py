"""
Unit tests for the Dyson integrator and the GUE sampler.
"""

import numpy as np
import pytest
from scipy import stats

import weylwalk_dyson.dyson_sde as dyson_sde
from weylwalk_core import Estimate, WeylPoint, in_weyl_rows
from weylwalk_core.errors import IntegrationError
from weylwalk_dyson import (
    dyson_drift_rows,
    gap_cdf_k2,
    gue_matrices,
    sample_gue_eigenvalues,
    simulate_dyson,
    simulate_dyson_batch,
)


class TestDrift:
    def test_k2(self):
        assert dyson_drift_rows(np.array([[0.0, 1.0]])).tolist() == [[-1.0, 1.0]]

    def test_k3_sums_to_zero(self):
        drift = dyson_drift_rows(np.array([[0.0, 0.5, 2.0]]))
        assert drift.sum() == pytest.approx(0.0, abs=1e-12)
        assert drift[0, 0] == pytest.approx(-1 / 0.5 - 1 / 2.0)


class TestIntegrator:
    """Euler-Maruyama with step halving."""

    def test_bessel_rate_k2(self, rng):
        # (gap/sqrt 2) is a 3-dimensional Bessel process: E r_t^2 = r_0^2 + 3t
        start = WeylPoint(coords=(0.0, 1.0))
        batch = simulate_dyson_batch(start, [1.0], 1e-3, 4_000, rng)
        r2 = (batch.at(0)[:, 1] - batch.at(0)[:, 0]) ** 2 / 2
        rate = Estimate.from_samples(r2 - 0.5)
        assert 2.5 <= rate.value <= 3.5

    def test_no_discards_at_small_steps(self, rng):
        batch = simulate_dyson_batch(WeylPoint(coords=(0.0, 1.0, 2.0)), [0.1, 0.2], 1e-4, 500, rng)
        assert batch.failed == 0
        assert batch.completed == 500
        assert np.all(in_weyl_rows(batch.at(1)))

    def test_single_path(self, rng):
        path = simulate_dyson(WeylPoint(coords=(0.0, 1.0, 2.0)), [0.0, 0.5, 1.0], 1e-3, rng)
        assert path.shape == (3, 3)
        assert path[0].tolist() == [0.0, 1.0, 2.0]
        assert np.all(in_weyl_rows(path))

    def test_origin_entrance_is_gue(self, rng):
        batch = simulate_dyson_batch(None, [1.0], 1e-3, 5_000, rng, k=2)
        gaps = batch.at(0)[:, 1] - batch.at(0)[:, 0]
        assert stats.kstest(gaps, lambda g: gap_cdf_k2(g, beta=2)).pvalue > 0.01

    def test_origin_entrance_needs_positive_time(self, rng):
        with pytest.raises(ValueError):
            simulate_dyson_batch(None, [0.0, 1.0], 1e-3, 10, rng, k=2)

    def test_grid_must_increase(self, rng):
        with pytest.raises(ValueError):
            simulate_dyson_batch(WeylPoint(coords=(0.0, 1.0)), [1.0, 0.5], 1e-3, 10, rng)

    def test_worker_count_does_not_matter(self, rng):
        start = WeylPoint(coords=(0.0, 1.0, 2.0))
        one = simulate_dyson_batch(start, [0.2], 1e-3, 120, rng, block_size=50, workers=1)
        two = simulate_dyson_batch(start, [0.2], 1e-3, 120, rng, block_size=50, workers=2)
        assert np.array_equal(one.positions, two.positions)

    def test_gap_floor_failure(self, rng, monkeypatch):
        monkeypatch.setattr(dyson_sde, "GAP_FLOOR", 100.0)
        with pytest.raises(IntegrationError):
            simulate_dyson(WeylPoint(coords=(0.0, 1.0)), [0.1], 1e-3, rng)


class TestGUE:
    def test_hermitian(self, rng):
        h = gue_matrices(3, 4, rng.generator())
        assert np.allclose(h, np.conj(np.swapaxes(h, 1, 2)))

    def test_eigenvalues_sorted(self, rng):
        eig = sample_gue_eigenvalues(4, 100, rng)
        assert eig.shape == (100, 4)
        assert np.all(np.diff(eig, axis=1) >= 0)

    def test_k2_gap_law(self, rng):
        eig = sample_gue_eigenvalues(2, 20_000, rng)
        assert stats.kstest(eig[:, 1] - eig[:, 0], lambda g: gap_cdf_k2(g, beta=2)).pvalue > 0.01

    def test_time_scaling(self, rng):
        eig = sample_gue_eigenvalues(2, 20_000, rng, t=4.0)
        assert stats.kstest((eig[:, 1] - eig[:, 0]) / 2, lambda g: gap_cdf_k2(g, beta=2)).pvalue > 0.01
