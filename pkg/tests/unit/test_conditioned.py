"""
Unit tests for the exact k=2 V-transform chain and survival conditioning.
"""

import numpy as np
import pytest

from weylwalk_core import WeylPoint
from weylwalk_core.errors import AcceptanceRateError
from weylwalk_harmonic import (
    chisquare_against_law,
    empirical_law,
    exact_htransform_chain_k2,
    exact_htransform_marginal_k2,
    exact_htransform_step_k2,
    htransform_kernel_k2,
    sample_conditioned_on_survival,
    total_variation,
)
from weylwalk_walks import exact_survival_probability


def _prob_gap_four(sample) -> float:
    gaps = np.diff(sample.prefixes[:, 0, :], axis=1)[:, 0]
    return float(np.mean(gaps == 4.0))


def _exact_prob_gap_four(m: int) -> float:
    # P(gap 4 at step 1 | tau > m) from (0, 2)
    start = WeylPoint.from_gaps([2])
    tail = exact_survival_probability(WeylPoint.from_gaps([4]), m - 1)
    return 0.25 * tail / exact_survival_probability(start, m)


class TestExactChain:
    """The V-transform gap chain for k=2 Rademacher steps."""

    def test_kernel_gap_two(self):
        assert dict(htransform_kernel_k2(2)) == {4: pytest.approx(0.5), 2: pytest.approx(0.5)}

    def test_kernel_gap_one(self):
        assert dict(htransform_kernel_k2(1)) == {3: pytest.approx(0.5), 1: pytest.approx(0.5)}

    @pytest.mark.parametrize("gap", [1, 2, 3, 4, 9, 10])
    def test_kernel_is_stochastic(self, gap):
        assert sum(p for _, p in htransform_kernel_k2(gap)) == pytest.approx(1.0)

    def test_single_step(self, rng):
        assert exact_htransform_step_k2(2, rng) in (2, 4)

    def test_chain_never_exits(self, rng):
        path = exact_htransform_chain_k2(1, 100_000, rng)
        assert path.shape == (100_001,)
        assert path.min() >= 1
        assert np.all(path % 2 == 1)

    def test_marginal_one_step(self):
        assert exact_htransform_marginal_k2(2, 1) == {4: pytest.approx(0.5), 2: pytest.approx(0.5)}

    def test_chain_matches_marginal(self, rng):
        n = 10
        finals = [exact_htransform_chain_k2(2, n, rng.substream(i))[-1] for i in range(4_000)]
        distance = total_variation(empirical_law(np.array(finals)), exact_htransform_marginal_k2(2, n))
        assert distance < 0.05


class TestLawHelpers:
    def test_total_variation(self):
        assert total_variation({1: 0.5, 2: 0.5}, {1: 0.5, 2: 0.5}) == 0.0
        assert total_variation({1: 1.0}, {2: 1.0}) == 1.0

    def test_weighted_empirical_law(self):
        law = empirical_law(np.array([1, 1, 2]), np.array([1.0, 1.0, 2.0]))
        assert law == {1: pytest.approx(0.5), 2: pytest.approx(0.5)}


def _draw(law: dict, size: int, rng) -> np.ndarray:
    keys = sorted(law)
    probs = np.array([law[key] for key in keys])
    return rng.generator().choice(keys, size=size, p=probs / probs.sum())


class TestChisquareAgainstLaw:
    """Weighted frequencies against an exact discrete law."""

    def test_draws_from_the_law_pass(self, rng):
        law = exact_htransform_marginal_k2(2, 10)
        fit = chisquare_against_law(_draw(law, 20_000, rng), None, law, 20_000)
        assert fit.passed()
        assert fit.cells >= 5

    def test_other_law_fails(self, rng):
        values = _draw(exact_htransform_marginal_k2(2, 10), 20_000, rng)
        fit = chisquare_against_law(values, None, exact_htransform_marginal_k2(2, 20), 20_000)
        assert fit.pvalue < 1e-6
        assert not fit.passed()

    def test_weights_reshape_the_frequencies(self):
        law = {2: 0.25, 4: 0.75}
        values = np.array([2, 4])
        assert chisquare_against_law(values, np.array([1.0, 3.0]), law, 400).statistic == pytest.approx(0.0)
        assert not chisquare_against_law(values, np.array([3.0, 1.0]), law, 400).passed()

    def test_sample_size_scales_the_statistic(self):
        law = {2: 0.5, 4: 0.5}
        values, weights = np.array([2, 4]), np.array([0.55, 0.45])
        small = chisquare_against_law(values, weights, law, 100)
        large = chisquare_against_law(values, weights, law, 10_000)
        assert large.statistic == pytest.approx(100 * small.statistic)
        assert small.passed() and not large.passed()

    def test_mass_off_the_support(self):
        fit = chisquare_against_law(np.array([2, 3]), None, {2: 0.5, 4: 0.5}, 1_000)
        assert fit.pvalue == 0.0
        assert fit.statistic == float("inf")

    def test_sparse_cells_are_pooled(self):
        law = {2: 0.5, 4: 0.49, 6: 0.005, 8: 0.005}
        fit = chisquare_against_law(np.array([2, 4]), np.array([0.5, 0.5]), law, 200)
        # 6 and 8 expect one count each and join the last kept cell
        assert fit.cells == 2

    def test_tiny_sample_size_rejected(self):
        with pytest.raises(ValueError):
            chisquare_against_law(np.array([2]), None, {2: 1.0}, 0.5)


class TestSurvivalConditioning:
    """Brute-force rejection on tau > m."""

    def test_one_step_law(self, gap_two, rademacher, rng):
        sample = sample_conditioned_on_survival(gap_two, rademacher, 1, 1, 40_000, rng)
        assert sample.acceptance.agrees_with(0.75)
        assert _prob_gap_four(sample) == pytest.approx(1 / 3, abs=0.015)

    def test_shifts_toward_transform_law(self, gap_two, rademacher, rng):
        exact = [_exact_prob_gap_four(m) for m in (1, 5, 20)]
        assert exact[0] == pytest.approx(1 / 3)
        assert exact[0] < exact[1] < exact[2] < 0.5
        for m, target in zip((1, 5, 20), exact):
            sample = sample_conditioned_on_survival(gap_two, rademacher, 1, m, 60_000, rng)
            p = _prob_gap_four(sample)
            se = np.sqrt(target * (1 - target) / sample.accepted)
            assert abs(p - target) < 4 * se

    def test_full_path_conditioning(self, spread_three, rademacher, rng):
        sample = sample_conditioned_on_survival(spread_three, rademacher, 6, 6, 20_000, rng)
        assert sample.acceptance.agrees_with(exact_survival_probability(spread_three, 6))
        assert np.all(np.diff(sample.endpoints(), axis=1) > 0)
        assert sample.prefixes.shape[1:] == (6, 3)

    def test_starved_sampler_raises(self, gaussian, rng):
        x = WeylPoint(coords=(0.0, 0.001, 0.002, 0.003))
        with pytest.raises(AcceptanceRateError) as info:
            sample_conditioned_on_survival(x, gaussian, 1, 50, 100, rng)
        assert info.value.diagnostics["samples"] == 100

    def test_requires_m_at_least_n(self, gap_two, rademacher, rng):
        with pytest.raises(ValueError):
            sample_conditioned_on_survival(gap_two, rademacher, 5, 2, 100, rng)
