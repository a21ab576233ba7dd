"""
Unit tests for path simulation and stopping times.
"""

import numpy as np
import pytest

from weylwalk_core import WeylPoint, in_weyl
from weylwalk_walks import StepLaw, simulate_batch, simulate_until, trace_path


class TestTracePath:
    """Hand-traced paths with explicit increments."""

    def test_tie_exits(self, gap_two):
        steps = np.array([[1.0, -1.0], [1.0, -1.0]])
        record = trace_path(gap_two, steps)
        assert record.tau == 1
        assert record.T == 1
        assert record.delta_at_stop == 0.0
        assert record.endpoint.coords == (1.0, 1.0)

    def test_survivor_is_censored(self, gap_two):
        steps = np.tile([[-1.0, 1.0], [1.0, -1.0]], (5, 1))
        record = trace_path(gap_two, steps)
        assert record.survived
        assert record.tau is None
        assert in_weyl(record.endpoint.coords)
        assert record.delta_at_stop == 2.0

    def test_exit_decided_by_order_not_sign(self, spread_three):
        # moves coordinate 1 past both others: two inversions, Delta stays positive
        steps = np.array([[5.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        record = trace_path(spread_three, steps)
        assert record.tau == 1
        assert record.delta_at_stop > 0
        assert record.T is None

    def test_running_maximum(self, gap_two):
        steps = np.array([[-1.0, 3.0], [0.5, -0.5]])
        assert trace_path(gap_two, steps).m_max == 3.0

    def test_nu_uses_horizon_threshold(self):
        x = WeylPoint(coords=(0.0, 1.0))
        # horizon 16, eps 0.25: threshold 2
        steps = np.zeros((16, 2))
        steps[2] = [-1.0, 1.0]
        record = trace_path(x, steps, eps=0.25)
        assert record.nu == 3

    def test_wrong_step_shape(self, gap_two):
        with pytest.raises(ValueError):
            trace_path(gap_two, np.zeros((3, 3)))

    def test_rejects_raw_start(self, gaussian, rng):
        with pytest.raises(ValueError):
            simulate_until((0.0, 1.0), gaussian, 10, 0.25, rng)


class TestSimulateBatch:
    """Properties of batches of simulated paths."""

    @pytest.mark.parametrize(
        "coords, law",
        [
            ((0.0, 1.0), StepLaw.gaussian()),
            ((0.0, 1.0, 2.0), StepLaw.laplace()),
            ((0.0, 2.0, 4.0, 6.0), StepLaw.rademacher()),
            ((0.0, 0.5, 1.0, 1.5), StepLaw.symmetrized_pareto(3.0)),
        ],
    )
    def test_tau_never_after_T(self, coords, law, rng):
        batch = simulate_batch(WeylPoint(coords=coords), law, 50, 20_000, rng)
        assert np.all(batch.tau_observed[batch.T_observed])
        both = batch.T_observed
        assert np.all(batch.tau[both] <= batch.T[both])

    def test_stopped_endpoint_outside(self, spread_three, gaussian, rng):
        batch = simulate_batch(spread_three, gaussian, 30, 5_000, rng)
        exited = batch.endpoint[batch.tau_observed]
        assert not np.any(np.all(np.diff(exited, axis=1) > 0, axis=1))
        survivors = batch.endpoint[batch.survived]
        assert np.all(np.diff(survivors, axis=1) > 0)

    def test_independent_of_worker_count(self, spread_three, gaussian, rng):
        serial = simulate_batch(spread_three, gaussian, 40, 3_000, rng, block_size=500, workers=1)
        parallel = simulate_batch(spread_three, gaussian, 40, 3_000, rng, block_size=500, workers=3)
        np.testing.assert_array_equal(serial.tau, parallel.tau)
        np.testing.assert_array_equal(serial.endpoint, parallel.endpoint)

    def test_same_seed_same_records(self, gap_two, rademacher, rng):
        a = simulate_batch(gap_two, rademacher, 20, 100, rng).records()
        b = simulate_batch(gap_two, rademacher, 20, 100, rng).records()
        assert a == b

    def test_coupled_monotonicity_in_start_gap(self, gaussian, rng):
        steps = gaussian.sample(rng.generator(), (500, 100, 2))
        narrow = WeylPoint(coords=(0.0, 0.5))
        wide = WeylPoint(coords=(0.0, 2.0))
        for path in steps:
            if trace_path(narrow, path).survived:
                assert trace_path(wide, path).survived
