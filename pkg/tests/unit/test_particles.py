"""
Unit tests for the weighted-particle sampler.
"""

import numpy as np
import pytest

from weylwalk_core import WeylPoint, in_weyl_rows
from weylwalk_core.errors import DegenerateRunError
from weylwalk_harmonic import (
    ConstantH,
    DeltaH,
    EnsembleReplicates,
    LatticeV,
    chisquare_against_law,
    effective_sample_size,
    exact_htransform_marginal_k2,
    sample_conditioned_paths,
    sample_replicate_ensembles,
    systematic_resample,
)


class PointMassH:
    """Positive only at one point; kills every particle after one step."""

    flagged = False

    def __init__(self, x: WeylPoint):
        self.x = x

    def __call__(self, y: WeylPoint) -> float:
        return 1.0 if y.coords == self.x.coords else 0.0


class FlaggedH(ConstantH):
    flagged = True


class TestResamplingHelpers:
    def test_effective_sample_size(self):
        assert effective_sample_size(np.ones(4)) == pytest.approx(4.0)
        assert effective_sample_size(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)
        assert effective_sample_size(np.zeros(3)) == 0.0

    def test_systematic_resample_point_mass(self, rng):
        index = systematic_resample(np.array([0.0, 3.0, 0.0]), 5, rng.generator())
        assert index.tolist() == [1] * 5

    def test_systematic_resample_proportions(self, rng):
        index = systematic_resample(np.array([1.0, 3.0]), 400, rng.generator())
        # systematic draws are within one of the expected counts
        assert abs(np.sum(index == 1) - 300) <= 1


class TestParticleSampler:
    """sample_conditioned_paths."""

    def test_zero_steps_copies_start(self, spread_three, gaussian, rng):
        ensemble = sample_conditioned_paths(spread_three, gaussian, 0, 50, DeltaH(), rng)
        assert ensemble.count == 50
        assert np.all(ensemble.positions == spread_three.as_array())
        assert np.all(ensemble.weights == 1.0)
        assert ensemble.ess == pytest.approx(50.0)

    def test_matches_exact_chain(self, gap_two, rademacher, rng):
        n = 10
        ensembles = sample_replicate_ensembles(gap_two, rademacher, n, 100_000, LatticeV(), rng, replicates=10)
        positions, weights = ensembles.pooled()
        gaps = np.rint(np.diff(positions, axis=1)[:, 0]).astype(int)
        size = ensembles.ess / ensembles.design_effect(_gap)
        fit = chisquare_against_law(gaps, weights, exact_htransform_marginal_k2(2, n), size)
        assert fit.cells >= 2
        assert fit.pvalue > 0.01, f"chi2 = {fit.statistic:.3g} over {fit.cells} cells"

    def test_endpoints_stay_in_chamber(self, spread_three, gaussian, rng):
        ensemble = sample_conditioned_paths(spread_three, gaussian, 30, 2_000, DeltaH(), rng)
        assert np.all(in_weyl_rows(ensemble.positions))
        assert 1.0 <= ensemble.ess <= ensemble.count
        assert ensemble.step_index == 30

    def test_weights_telescope(self, spread_three, gaussian, rng):
        ensemble = sample_conditioned_paths(spread_three, gaussian, 25, 2_000, DeltaH(), rng)
        assert ensemble.telescoping_error() < 1e-10

    def test_survival_mode_resamples(self, gap_one, rademacher, rng):
        ensemble = sample_conditioned_paths(gap_one, rademacher, 40, 1_000, ConstantH(), rng)
        assert ensemble.resamples > 0
        assert ensemble.count == 1_000 or ensemble.ess >= 500

    def test_recorded_trace(self, gap_two, rademacher, rng):
        ensemble = sample_conditioned_paths(
            gap_two, rademacher, 5, 100, LatticeV(), rng, record_paths=True
        )
        assert [step for step, _, _ in ensemble.trace] == [0, 1, 2, 3, 4, 5]

    def test_draw_endpoints(self, spread_three, gaussian, rng):
        ensemble = sample_conditioned_paths(spread_three, gaussian, 10, 500, DeltaH(), rng)
        draws = ensemble.draw_endpoints(rng.substream(9), 200)
        assert draws.shape == (200, 3)
        assert np.all(in_weyl_rows(draws))

    def test_same_stream_same_ensemble(self, spread_three, gaussian, rng):
        a = sample_conditioned_paths(spread_three, gaussian, 12, 300, DeltaH(), rng)
        b = sample_conditioned_paths(spread_three, gaussian, 12, 300, DeltaH(), rng)
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.weights, b.weights)

    def test_dead_population_raises(self, gap_two, gaussian, rng):
        with pytest.raises(DegenerateRunError) as info:
            sample_conditioned_paths(gap_two, gaussian, 3, 20, PointMassH(gap_two), rng)
        assert info.value.diagnostics["step"] == 1

    def test_flagged_h_refused(self, gap_two, gaussian, rng):
        with pytest.raises(ValueError):
            sample_conditioned_paths(gap_two, gaussian, 3, 20, FlaggedH(), rng)


def _gap(positions: np.ndarray) -> np.ndarray:
    return positions[:, -1] - positions[:, 0]


class TestEnsembleReplicates:
    """Independent ensembles and the statistics built on them."""

    def test_split_and_pooled_weights(self, spread_three, gaussian, rng):
        ensembles = sample_replicate_ensembles(spread_three, gaussian, 8, 1_000, DeltaH(), rng, replicates=4)
        assert ensembles.replicates == 4
        assert [e.count for e in ensembles.ensembles] == [250] * 4
        positions, weights = ensembles.pooled()
        assert positions.shape == (1_000, 3)
        assert np.sum(weights) == pytest.approx(1.0)
        for e in ensembles.ensembles:
            assert np.sum(e.normalized_weights()) / 4 == pytest.approx(0.25)
        assert 1.0 <= ensembles.ess <= ensembles.count

    def test_ensembles_use_distinct_streams(self, spread_three, gaussian, rng):
        ensembles = sample_replicate_ensembles(spread_three, gaussian, 5, 200, DeltaH(), rng, replicates=2)
        first, second = ensembles.ensembles
        assert not np.array_equal(first.positions, second.positions)

    def test_only_first_ensemble_records_paths(self, gap_two, rademacher, rng):
        ensembles = sample_replicate_ensembles(
            gap_two, rademacher, 3, 40, LatticeV(), rng, replicates=2, record_paths=True
        )
        assert len(ensembles.ensembles[0].trace) == 4
        assert ensembles.ensembles[1].trace == []

    def test_mean_estimate_uses_replicate_spread(self, spread_three, gaussian, rng):
        ensembles = sample_replicate_ensembles(spread_three, gaussian, 10, 2_000, DeltaH(), rng, replicates=5)
        means = ensembles.replicate_means(_gap)
        estimate = ensembles.mean_estimate(_gap)
        assert estimate.value == pytest.approx(float(np.mean(means)))
        assert estimate.stderr == pytest.approx(float(np.std(means, ddof=1) / np.sqrt(5)))

    def test_mean_estimate_needs_two_ensembles(self, spread_three, gaussian, rng):
        ensembles = sample_replicate_ensembles(spread_three, gaussian, 2, 50, DeltaH(), rng, replicates=1)
        with pytest.raises(ValueError):
            ensembles.mean_estimate(_gap)
        assert ensembles.design_effect(_gap) == 1.0

    def test_design_effect_at_least_one(self, gap_one, rademacher, rng):
        # survival conditioning resamples often, so particles share ancestors
        ensembles = sample_replicate_ensembles(gap_one, rademacher, 40, 4_000, ConstantH(), rng, replicates=8)
        assert ensembles.resamples > 0
        assert ensembles.design_effect(_gap) >= 1.0

    def test_draw_endpoints(self, spread_three, gaussian, rng):
        ensembles = sample_replicate_ensembles(spread_three, gaussian, 6, 400, DeltaH(), rng, replicates=4)
        draws = ensembles.draw_endpoints(rng.substream(7), 300)
        assert draws.shape == (300, 3)
        assert np.all(in_weyl_rows(draws))

    @pytest.mark.parametrize("replicates, particles", [(0, 10), (11, 10)])
    def test_replicates_out_of_range(self, gap_two, rademacher, rng, replicates, particles):
        with pytest.raises(ValueError):
            sample_replicate_ensembles(gap_two, rademacher, 2, particles, LatticeV(), rng, replicates=replicates)

    def test_wraps_plain_ensembles(self, spread_three, gaussian, rng):
        a = sample_conditioned_paths(spread_three, gaussian, 3, 100, DeltaH(), rng.substream(0))
        b = sample_conditioned_paths(spread_three, gaussian, 3, 100, DeltaH(), rng.substream(1))
        assert EnsembleReplicates([a, b]).count == 200
