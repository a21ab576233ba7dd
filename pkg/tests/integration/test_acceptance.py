"""
Acceptance runs of the shipped recipes at their full budgets.

These take minutes each; deselect with -m "not slow".
"""

import math
from pathlib import Path

import pytest

from weylwalk_dyson import constant_kappa
from weylwalk_lab import EXIT_OK, build_config, run
from weylwalk_lab.experiments import RunResult
from weylwalk_recipes import RecipeRegistry

pytestmark = [pytest.mark.slow, pytest.mark.integration]

SEED = 20240611


@pytest.fixture(scope="module")
def registry(recipes_dir: Path) -> RecipeRegistry:
    return RecipeRegistry(recipes_dir)


def _run_recipe(registry: RecipeRegistry, name: str, out_dir: Path, **overrides) -> RunResult:
    recipe = registry.load(name)
    config = build_config(recipe.defaults, None, {"seed": SEED, "out_dir": out_dir, **overrides})
    return run(config, recipe)


def _checks(result: RunResult) -> dict:
    return {check.name: check for check in result.checks}


def _assert_passed(result: RunResult, *names: str) -> None:
    checks = _checks(result)
    for name in names:
        assert name in checks, f"{name} was not run"
        assert checks[name].passed, f"{name}: {checks[name].detail}"


class TestConstants:
    """Closed forms, quadrature and Monte Carlo for the Gaussian integral."""

    def test_constants_recipe(self, registry, tmp_path):
        result = _run_recipe(registry, "constants", tmp_path)
        _assert_passed(
            result, "kappa_closed_forms", "integral_quadrature", "integral_monte_carlo",
            "km_vs_reflection", "km_vs_asymptotic", "chapman_kolmogorov",
        )
        assert result.exit_code == EXIT_OK


class TestLatticeFixtures:
    """Monte Carlo estimators against enumeration at 1e5 samples."""

    def test_splitting(self, registry, tmp_path):
        result = _run_recipe(registry, "tail-toy", tmp_path)
        _assert_passed(result, "exact_survival")

    def test_direct(self, registry, tmp_path):
        result = _run_recipe(registry, "tail-toy", tmp_path, estimator="direct", samples=100_000)
        _assert_passed(result, "exact_survival")


class TestTail:
    """Survival exponent and constant for k=3 Gaussian steps."""

    def test_exponent_and_constant(self, registry, tmp_path):
        result = _run_recipe(registry, "tail", tmp_path)
        _assert_passed(result, "tail_exponent", "tail_constant")
        fit = result.summary["fit"]
        assert fit["exponent"] == pytest.approx(1.5, abs=0.15)
        assert fit["r_squared"] >= 0.99
        assert result.summary["kappa"] == pytest.approx(1 / (4 * math.sqrt(math.pi)))

    def test_heavy_tail_below_light_tail(self, registry, tmp_path):
        result = _run_recipe(registry, "heavy-tail", tmp_path)
        _assert_passed(result, "below_light_tail")
        assert result.summary["conjectured_exponent"] == pytest.approx(2.75)
        assert result.summary["light_exponent"] == pytest.approx(3.0)


class TestLimitLaw:
    """Rescaled conditioned endpoints against the limit laws."""

    def test_k2_survival(self, registry, tmp_path):
        result = _run_recipe(registry, "limit-dist", tmp_path)
        _assert_passed(result, "limit_law", "mean_gap")
        assert result.summary["mean_gap"] == pytest.approx(math.sqrt(math.pi), rel=0.05)

    def test_k3_survival(self, registry, tmp_path):
        result = _run_recipe(registry, "limit-dist-k3", tmp_path)
        _assert_passed(result, "limit_law")
        assert result.summary["gof"]["test"] == "chi2"

    def test_k2_v_transform(self, registry, tmp_path):
        result = _run_recipe(registry, "limit-dist-vtransform", tmp_path)
        _assert_passed(result, "limit_law", "mean_gap")
        assert result.summary["beta"] == 2
        assert result.summary["mean_gap"] == pytest.approx(4 / math.sqrt(math.pi), rel=0.05)

    def test_k2_lattice_v_transform_matches_exact_chain(self, registry, tmp_path):
        result = _run_recipe(
            registry, "limit-dist-vtransform", tmp_path, law="rademacher", start=[0.0, 2.0], horizons=[20],
            particles=100_000, replicates=10,
        )
        _assert_passed(result, "exact_marginal")
        assert result.summary["design_effect"] >= 1.0
        assert _checks(result)["exact_marginal"].values["cells"] >= 5


class TestVProperties:
    """Monotonicity, bound, asymptotics, positivity and harmonicity of V."""

    BASIC = ("monotone", "bounded_by_delta_1", "asymptotic_to_delta", "positive")

    def test_k3_gaussian(self, registry, tmp_path):
        result = _run_recipe(registry, "v-properties", tmp_path)
        assert result.summary["grid_points"] == 20
        _assert_passed(result, *self.BASIC, "harmonic")

    @pytest.mark.parametrize("k, law", [(2, "gaussian"), (2, "rademacher"), (3, "rademacher")])
    def test_other_laws(self, registry, tmp_path, k, law):
        result = _run_recipe(registry, "v-properties", tmp_path, k=k, law=law, start=[2.0 * i for i in range(k)])
        assert result.summary["grid_points"] == 20
        _assert_passed(result, *self.BASIC, "harmonic")

    def test_k2_lattice_harmonicity_is_exact(self, registry, tmp_path):
        result = _run_recipe(registry, "v-properties", tmp_path, k=2, law="rademacher", start=[0.0, 2.0])
        harmonic = _checks(result)["harmonic"]
        assert len(harmonic.values["defects"]) == 20
        assert all(d == 0.0 for d in harmonic.values["defects"])


class TestDyson:
    """Dyson Brownian motion against the GUE law."""

    def test_dyson_recipe(self, registry, tmp_path):
        result = _run_recipe(registry, "dyson-compare", tmp_path)
        _assert_passed(result, "origin_entrance", "started_rescaled", "bessel_rate")
        assert constant_kappa(2) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-12)
