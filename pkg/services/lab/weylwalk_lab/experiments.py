"""
Experiment driver.

run(config) executes one experiment kind, writes its tables, path dumps,
config copy, report and manifest under

    <out_dir>/<kind>-<run_id>/

and returns an exit code: 0 when every acceptance check passes, 2 when a
check fails, 3 when the simulation degenerates (dead particle populations,
starved rejection samplers). Everything except manifest timestamps is a
function of the configuration.

Random streams: every experiment draws from RngStream(seed) and hands each
stage its own fixed sub-stream, so stages never share randomness.
"""

import itertools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from weylwalk_core import Estimate, WeylPoint, separation_threshold, vandermonde
from weylwalk_core.errors import DataError, DegenerateRunError
from weylwalk_dyson import (
    IntegralMethod,
    bm_survival_asymptotic,
    bm_survival_closed_k2,
    bm_survival_km,
    chapman_kolmogorov_k2,
    constant_K,
    constant_kappa,
    gaussian_integral_vandermonde,
    mean_gap_k2,
    normalizer_delta_squared,
    normalizer_mu,
    simulate_dyson_batch,
    vandermonde_gaussian_integral_closed,
)
from weylwalk_harmonic import (
    ConstantH,
    EnsembleReplicates,
    HFunction,
    LatticeV,
    PropertyCheck,
    VTable,
    all_passed,
    calibrate_bound_constant,
    check_asymptotic_ratio,
    check_bound,
    check_harmonicity,
    check_harmonicity_exact,
    check_martingale_split,
    check_monotonicity,
    check_overshoot,
    check_positivity,
    check_vT_lower_bound,
    check_vT_submartingale,
    chisquare_against_law,
    empirical_law,
    estimate_v_stopped,
    exact_htransform_marginal_k2,
    exact_v_estimate,
    grid_points,
    sample_replicate_ensembles,
    total_variation,
)
from weylwalk_recipes import RecipeConfig, render_report
from weylwalk_storage import ArtifactWriter, run_id
from weylwalk_walks import (
    RngStream,
    empirical_tail_slope,
    exact_survival_curve,
    survival_curve_direct,
    survival_curve_splitting,
)

from .config import ConditionMode, ExperimentConfig, ExperimentKind, TailEstimator, dump_config
from .stats import conjectured_exponent, fit_tail_exponent, gof_against_mu, light_tail_exponent

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ACCEPTANCE = 2
EXIT_DEGENERATE = 3
EXIT_USAGE = 64

# Enumeration of the lattice walk stays cheap up to these horizons
EXACT_HORIZON_LIMIT = {2: 4096, 3: 256}
EXACT_MARGINAL_LIMIT = 2048
R_SQUARED_MIN = 0.99

CHECKS_HEADER = ["property", "passed", "detail"]


@dataclass
class RunResult:
    """Outcome of one run."""

    exit_code: int
    run_dir: Path
    run_id: str
    checks: list[PropertyCheck] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_OK


class _Run:
    """State shared by the stages of one experiment."""

    def __init__(self, config: ExperimentConfig, writer: ArtifactWriter):
        self.config = config
        self.writer = writer
        self.rng = RngStream(seed=config.seed)
        self.checks: list[PropertyCheck] = []
        self.summary: dict[str, Any] = {}

    def stream(self, *indices: int) -> RngStream:
        return self.rng.substream(*indices)

    def check(self, check: PropertyCheck) -> None:
        self.checks.append(check)
        level = logging.INFO if check.passed else logging.WARNING
        logger.log(level, f"[{'PASS' if check.passed else 'FAIL'}] {check.name}: {check.detail}")


# ---------------------------------------------------------------------------
# tail and heavy-tail
# ---------------------------------------------------------------------------


def _survival_points(ctx: _Run) -> list[tuple[int, Estimate]]:
    c = ctx.config
    x, law, horizons = c.start_point, c.step_law, list(c.horizons)
    logger.info(f"Survival curve: k={c.k}, law={c.law}, x={x.coords}, {c.estimator.value}, n up to {horizons[-1]}")
    if c.estimator is TailEstimator.SPLITTING:
        points = survival_curve_splitting(
            x, law, horizons, c.particles, ctx.stream(0),
            replicates=c.replicates, block_size=c.block_size, workers=c.workers,
        )
    else:
        points = survival_curve_direct(
            x, law, horizons, c.samples, ctx.stream(0), block_size=c.block_size, workers=c.workers
        )

    exact = _exact_survival(c, x)
    rows = []
    for n, estimate in points:
        rows.append({
            "n": n,
            "p_hat": estimate.value,
            "stderr": estimate.stderr,
            "ci_low": estimate.ci_low,
            "ci_high": estimate.ci_high,
            "exact": exact[n] if exact is not None else None,
            "flags": " ".join(estimate.flags),
        })
    ctx.writer.table("survival", ["n", "p_hat", "stderr", "ci_low", "ci_high", "exact", "flags"], rows)

    dead = [n for n, estimate in points if estimate.value == 0]
    if dead:
        raise DegenerateRunError(
            f"no surviving paths at n = {dead[0]}; raise the particle or sample budget",
            diagnostics={"horizon": dead[0], "estimator": c.estimator.value, "particles": c.particles},
        )

    if exact is not None:
        failures = []
        for n, estimate in points:
            agrees = estimate.agrees_with(exact[n])
            ctx.writer.record(
                "checkpoint", n=n, exact=exact[n], estimate=estimate.value, stderr=estimate.stderr, agrees=agrees
            )
            if not agrees:
                failures.append(n)
        ctx.check(PropertyCheck(
            name="exact_survival",
            passed=not failures,
            detail=f"{len(points) - len(failures)}/{len(points)} horizons within 3 stderr of enumeration",
            values={"failures": failures},
        ))
    return points


def _exact_survival(config: ExperimentConfig, x: WeylPoint) -> list[float] | None:
    if not config.step_law.is_lattice:
        return None
    limit = EXACT_HORIZON_LIMIT.get(config.k)
    if limit is None or config.horizons[-1] > limit:
        return None
    if not all(float(g).is_integer() for g in x.gaps()):
        return None
    return exact_survival_curve(x, config.horizons[-1])


def _fit(ctx: _Run, points: list[tuple[int, Estimate]], target: float):
    """Tail fit, or None when too few horizons were asked for."""
    c = ctx.config
    if len(points) < 4:
        logger.info(f"{len(points)} horizons configured; tail fit skipped")
        return None
    try:
        fit = fit_tail_exponent(points, c.max_relative_stderr)
    except DataError as e:
        ctx.check(PropertyCheck(name="tail_fit", passed=False, detail=str(e)))
        return None
    ctx.writer.table("tail_fit", [*fit.as_row(), "target_exponent"], [{**fit.as_row(), "target_exponent": target}])
    ctx.summary["fit"] = fit.as_row()
    return fit


def _tail(ctx: _Run) -> None:
    c = ctx.config
    points = _survival_points(ctx)
    target = light_tail_exponent(c.k)
    ctx.summary["target_exponent"] = target
    fit = _fit(ctx, points, target)
    if fit is None:
        return
    ctx.check(PropertyCheck(
        name="tail_exponent",
        passed=abs(fit.exponent - target) <= c.slope_tolerance and fit.r_squared >= R_SQUARED_MIN,
        detail=f"exponent {fit.exponent:.4f} +- {fit.stderr_slope:.2g} (r2 {fit.r_squared:.4f}) against {target:g}",
        values={"exponent": fit.exponent, "target": target},
    ))
    if c.check_constant:
        _tail_constant(ctx, points, target)


def _tail_constant(ctx: _Run, points: list[tuple[int, Estimate]], exponent: float) -> None:
    """p(n) n^exponent / V(x) against kappa at the two largest horizons."""
    c = ctx.config
    x, law = c.start_point, c.step_law
    if law.is_lattice and c.k == 2:
        v = exact_v_estimate(x)
    else:
        v = estimate_v_stopped(
            x, law, c.v_horizon, c.v_samples, ctx.stream(1), block_size=c.block_size, workers=c.workers
        )
    kappa = constant_kappa(c.k)
    rows = []
    for n, estimate in points[-2:]:
        ratio = estimate.value * n**exponent / v.value / kappa
        rows.append({"n": n, "p_hat": estimate.value, "v_hat": v.value, "v_stderr": v.v_hat.stderr,
                     "kappa": kappa, "ratio_to_kappa": ratio})
    ctx.writer.table("constant", ["n", "p_hat", "v_hat", "v_stderr", "kappa", "ratio_to_kappa"], rows)
    ratios = [row["ratio_to_kappa"] for row in rows]
    ctx.summary["kappa"] = kappa
    ctx.summary["v_hat"] = v.value
    ctx.check(PropertyCheck(
        name="tail_constant",
        passed=all(abs(r - 1.0) <= c.constant_tolerance for r in ratios),
        detail=f"p n^{exponent:g} / (kappa V) = {', '.join(f'{r:.3f}' for r in ratios)}",
        values={"ratios": ratios},
    ))


def _heavy_tail(ctx: _Run) -> None:
    c = ctx.config
    law = c.step_law
    alpha = law.tail_index
    light = light_tail_exponent(c.k)
    conjectured = conjectured_exponent(c.k, c.heavy_j, alpha)
    slope = empirical_tail_slope(law, ctx.stream(2), samples=max(c.samples, 100_000))
    ctx.summary.update({"light_exponent": light, "conjectured_exponent": conjectured,
                        "alpha": alpha, "empirical_step_tail_slope": slope})
    logger.info(f"Step law tail slope {slope:.3f} (declared index {alpha:g})")

    points = _survival_points(ctx)
    fit = _fit(ctx, points, conjectured)
    if fit is None:
        return
    low, high = fit.exponent_interval()
    ctx.check(PropertyCheck(
        name="below_light_tail",
        passed=high < light,
        detail=(
            f"exponent {fit.exponent:.4f}, 95% CI [{low:.4f}, {high:.4f}] against light tail {light:g} "
            f"(conjectured {conjectured:g})"
        ),
        values={"exponent": fit.exponent, "ci_high": high, "light": light, "conjectured": conjectured},
    ))


# ---------------------------------------------------------------------------
# v-properties
# ---------------------------------------------------------------------------


def _dominated_pairs(axes: list[tuple[float, ...]]) -> list[tuple[WeylPoint, WeylPoint]]:
    """(x, y) with y one grid step wider than x in a single gap."""
    pairs = []
    for index in itertools.product(*(range(len(axis)) for axis in axes)):
        x = WeylPoint.from_gaps([axis[i] for axis, i in zip(axes, index)])
        for j, axis in enumerate(axes):
            if index[j] + 1 < len(axis):
                wider = list(index)
                wider[j] += 1
                pairs.append((x, WeylPoint.from_gaps([a[i] for a, i in zip(axes, wider)])))
    return pairs


def _v_properties(ctx: _Run) -> None:
    c = ctx.config
    law, k = c.step_law, c.k
    axes = c.property_axes()
    points = grid_points(axes)
    h, samples = c.v_horizon, c.v_samples
    ctx.summary["grid_points"] = len(points)
    if len(points) < c.grid_size:
        logger.warning(f"grid_gaps give {len(points)} property points, fewer than grid_size {c.grid_size}")
    logger.info(f"V properties: k={k}, law={c.law}, {len(points)} grid points on axes {axes}, horizon {h}")

    ctx.check(check_monotonicity(_dominated_pairs(axes), law, h, samples, ctx.stream(10)))
    # calibration always sees the widest point
    coarse = points[::2] if len(points) % 2 == 1 else [*points[::2], points[-1]]
    bound = calibrate_bound_constant(coarse, law, h, samples, ctx.stream(11))
    ctx.summary["bound_constant"] = bound
    ctx.check(check_bound(points, bound, law, h, samples, ctx.stream(12)))
    ctx.check(check_asymptotic_ratio(k, c.spacings, law, h, samples, ctx.stream(13)))
    ctx.check(check_positivity(points, law, h, samples, ctx.stream(14)))

    x = c.start_point
    ctx.check(check_martingale_split(x, law, c.horizons[-1], c.samples, ctx.stream(15)))
    ctx.check(check_vT_submartingale(x, law, c.horizons, c.samples, ctx.stream(16)))
    ctx.check(check_vT_lower_bound(x, law, c.horizons[-1], c.samples, ctx.stream(17)))
    n = c.horizons[0]
    separated = WeylPoint.from_gaps([2 * separation_threshold(n, c.eps)] * (k - 1))
    ctx.check(check_overshoot(separated, law, n, c.samples, ctx.stream(18)))

    _harmonicity(ctx, points)
    ctx.writer.table("properties", CHECKS_HEADER, [check.as_row() for check in ctx.checks])


def _harmonicity(ctx: _Run, points: list[WeylPoint]) -> None:
    c = ctx.config
    law = c.step_law
    if law.is_lattice and c.k == 2:
        defects = [check_harmonicity_exact(x, LatticeV()) for x in points]
        worst = max(abs(d) for d in defects)
        ctx.check(PropertyCheck(
            name="harmonic",
            passed=worst == 0.0,
            detail=f"max |E[V(x+S_1); tau > 1] - V(x)| = {worst:g} by enumeration on {len(points)} points",
            values={"defects": defects},
        ))
        return

    # interpolation needs a denser table than the property grid
    axes = [c.table_gaps or c.grid_gaps] * (c.k - 1)
    table = _build_vtable(ctx, axes)
    nodes = grid_points(axes)
    interior = [x for x in nodes if min(x.gaps()) >= axes[0][1]][:5] or nodes[:5]
    failures = []
    rel = table.max_relative_stderr()
    for i, x in enumerate(interior):
        defect = check_harmonicity(x, law, table, c.samples, ctx.stream(19, i))
        # the table's own noise enters through V(x)
        sigma = math.hypot(defect.stderr, rel * table(x))
        if abs(defect.value) > 3 * sigma:
            failures.append((x.coords, defect.value, sigma))
    ctx.check(PropertyCheck(
        name="harmonic",
        passed=not failures,
        detail=f"{len(interior) - len(failures)}/{len(interior)} V-table points harmonic within 3 sigma",
        values={"failures": failures},
    ))


def _build_vtable(ctx: _Run, axes: list[tuple[float, ...]]) -> VTable:
    c = ctx.config
    table = VTable.build(
        c.k, axes, c.step_law, c.v_horizon, c.v_samples, ctx.stream(3),
        fallback_gap=c.fallback_gap or axes[0][-1], adaptive=False,
        block_size=c.block_size, workers=c.workers,
    )
    path = table.save(ctx.writer.out_dir / "vtable.csv")
    ctx.writer.record("vtable", file=path.name, points=len(table.entries))
    return table


# ---------------------------------------------------------------------------
# limit-dist
# ---------------------------------------------------------------------------


def _h_function(ctx: _Run) -> HFunction:
    c = ctx.config
    if c.mode is ConditionMode.SURVIVAL:
        return ConstantH()
    if c.step_law.is_lattice and c.k == 2:
        return LatticeV()
    return _build_vtable(ctx, [c.table_gaps or c.grid_gaps] * (c.k - 1))


def _spread(positions: np.ndarray) -> np.ndarray:
    return positions[:, -1] - positions[:, 0]


def _limit_dist(ctx: _Run) -> None:
    c = ctx.config
    x, law, n = c.start_point, c.step_law, c.horizons[-1]
    beta = 1 if c.mode is ConditionMode.SURVIVAL else 2
    h = _h_function(ctx)
    logger.info(
        f"Conditioned sampler ({c.mode.value}): k={c.k}, law={c.law}, n={n}, "
        f"{c.particles} particles in {c.replicates} ensembles"
    )
    ensembles = sample_replicate_ensembles(
        x, law, n, c.particles, h, ctx.stream(4), c.replicates, record_paths=c.record_paths
    )
    if c.record_paths:
        ctx.writer.path_dump("particles", ensembles.ensembles[0].trace)

    scale = math.sqrt(n)
    draws = ensembles.draw_endpoints(ctx.stream(5), c.gof_samples or c.particles) / scale
    ctx.writer.table(
        "endpoints",
        [f"y{j + 1}" for j in range(c.k)],
        ({f"y{j + 1}": float(v) for j, v in enumerate(row)} for row in draws),
    )

    positions, weights = ensembles.pooled()
    design_effect = ensembles.design_effect(_spread)
    report = gof_against_mu(
        positions / scale, ctx.stream(6), beta=beta, weights=weights, design_effect=design_effect
    )
    ctx.writer.table("limit_gof", list(report.as_row()), [report.as_row()])
    ctx.summary.update({
        "beta": beta,
        "gof": report.as_row(),
        "replicates": ensembles.replicates,
        "ess": ensembles.ess,
        "design_effect": design_effect,
        "resamples": ensembles.resamples,
        "telescoping_error": max(e.telescoping_error() for e in ensembles.ensembles),
    })
    ctx.check(PropertyCheck(
        name="limit_law",
        passed=report.passed(),
        detail=(
            f"{report.test} p = {report.pvalue:.4g} against the beta={beta} law "
            f"({ensembles.count} weighted particles, effective size {report.samples})"
        ),
        values=report.as_row(),
    ))

    if c.k == 2:
        mean = ensembles.mean_estimate(lambda p: _spread(p) / scale)
        target = mean_gap_k2(beta)
        ctx.summary["mean_gap"] = mean.value
        ctx.check(PropertyCheck(
            name="mean_gap",
            passed=mean.agrees_with(target),
            detail=(
                f"rescaled mean gap {mean.value:.4f} +- {mean.stderr:.2g} "
                f"({ensembles.replicates} ensembles) against {target:.5f}"
            ),
            values={"mean": mean.value, "stderr": mean.stderr, "target": target},
        ))
        if isinstance(h, LatticeV) and n <= EXACT_MARGINAL_LIMIT:
            _exact_marginal(ctx, ensembles, int(x.gaps()[0]), n)


def _exact_marginal(ctx: _Run, ensembles: EnsembleReplicates, gap: int, n: int) -> None:
    """Weighted gap law of the particles against the exact V-transform chain."""
    exact = exact_htransform_marginal_k2(gap, n)
    positions, weights = ensembles.pooled()
    gaps = np.rint(_spread(positions)).astype(int)
    size = ensembles.ess / ensembles.design_effect(_spread)
    fit = chisquare_against_law(gaps, weights, exact, size)
    ctx.summary["exact_marginal_tv"] = total_variation(empirical_law(gaps, weights), exact)
    ctx.check(PropertyCheck(
        name="exact_marginal",
        passed=fit.passed(),
        detail=(
            f"chi2 p = {fit.pvalue:.4g} over {fit.cells} cells against the exact chain at n={n} "
            f"(effective size {fit.sample_size:.0f})"
        ),
        values={"statistic": fit.statistic, "pvalue": fit.pvalue, "cells": fit.cells},
    ))


# ---------------------------------------------------------------------------
# dyson-compare
# ---------------------------------------------------------------------------


def _dyson_compare(ctx: _Run) -> None:
    c = ctx.config
    k = c.k
    rows = []

    # entrance from the origin, evolved from t=1 to t=2 by the integrator
    entrance = simulate_dyson_batch(
        None, [1.0, 2.0], c.dt, c.dyson_paths, ctx.stream(7), k=k, block_size=c.block_size, workers=c.workers
    )
    report = gof_against_mu(entrance.at(1) / math.sqrt(2.0), ctx.stream(8), beta=2)
    rows.append({"stage": "origin_t2", **report.as_row(), "failed": entrance.failed})
    ctx.check(PropertyCheck(
        name="origin_entrance",
        passed=report.passed(),
        detail=f"{report.test} p = {report.pvalue:.4g} at t=2 against the GUE law",
        values=report.as_row(),
    ))

    x, horizon = c.start_point, c.dyson_time
    started = simulate_dyson_batch(
        x, [horizon], c.dt, c.dyson_paths, ctx.stream(20), block_size=c.block_size, workers=c.workers
    )
    report = gof_against_mu(started.at(0) / math.sqrt(horizon), ctx.stream(21), beta=2)
    rows.append({"stage": "from_start", **report.as_row(), "failed": started.failed})
    ctx.check(PropertyCheck(
        name="started_rescaled",
        passed=report.passed(),
        detail=f"{report.test} p = {report.pvalue:.4g} at t={horizon:g} from {x.coords} against the GUE law",
        values=report.as_row(),
    ))

    if k == 2:
        # gap/sqrt(2) is a 3-dimensional Bessel process
        bessel = simulate_dyson_batch(
            x, [1.0], c.dt, c.dyson_paths, ctx.stream(22), block_size=c.block_size, workers=c.workers
        )
        r2 = np.diff(bessel.at(0), axis=1)[:, 0] ** 2 / 2
        rate = Estimate.from_samples(r2 - x.gaps()[0] ** 2 / 2)
        ctx.summary["bessel_rate"] = rate.value
        ctx.check(PropertyCheck(
            name="bessel_rate",
            passed=2.5 <= rate.value <= 3.5,
            detail=f"E[r_1^2] - r_0^2 = {rate.value:.3f} +- {rate.stderr:.2g} against 3",
            values={"rate": rate.value, "stderr": rate.stderr},
        ))

    failed = entrance.failed + started.failed
    ctx.summary["discarded_paths"] = failed
    ctx.writer.table("dyson", list(rows[0]), rows)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def _constants(ctx: _Run) -> None:
    c = ctx.config
    rows = []
    quad_failures, mc_failures = [], []
    for k in range(2, c.k + 1):
        closed = vandermonde_gaussian_integral_closed(k)
        row: dict[str, Any] = {
            "k": k,
            "K": constant_K(k),
            "kappa": constant_kappa(k),
            "Z_mu": normalizer_mu(k),
            "Z_delta_squared": normalizer_delta_squared(k),
            "integral_closed": closed,
            "integral_quadrature": None,
            "integral_mc": None,
            "integral_mc_stderr": None,
        }
        if k <= 3:
            quad = gaussian_integral_vandermonde(k, IntegralMethod.QUADRATURE)
            row["integral_quadrature"] = quad.value
            if abs(quad.value - closed) > 1e-6 * closed:
                quad_failures.append(k)
        mc = gaussian_integral_vandermonde(k, IntegralMethod.MONTE_CARLO, c.samples, ctx.stream(9, k))
        row["integral_mc"], row["integral_mc_stderr"] = mc.value, mc.stderr
        if not mc.agrees_with(closed):
            mc_failures.append(k)
        rows.append(row)
    ctx.writer.table("constants", list(rows[0]), rows)
    ctx.summary["constants"] = rows

    ctx.check(PropertyCheck(
        name="kappa_closed_forms",
        passed=(
            abs(constant_kappa(2) - 1 / math.sqrt(math.pi)) <= 1e-12
            and abs(constant_kappa(3) - 1 / (4 * math.sqrt(math.pi))) <= 1e-12
        ),
        detail=f"kappa(2) = {constant_kappa(2):.15g}, kappa(3) = {constant_kappa(3):.15g}",
    ))
    ctx.check(PropertyCheck(
        name="integral_quadrature",
        passed=not quad_failures,
        detail=f"quadrature within 1e-6 of the closed form for k <= {min(c.k, 3)}",
        values={"failures": quad_failures},
    ))
    ctx.check(PropertyCheck(
        name="integral_monte_carlo",
        passed=not mc_failures,
        detail=f"Monte Carlo within 3 stderr for k in 2..{c.k} at {c.samples} samples",
        values={"failures": mc_failures},
    ))
    _brownian(ctx)


def _brownian(ctx: _Run) -> None:
    rows = []
    y2 = WeylPoint(coords=(0.0, 1.0))
    worst = 0.0
    for t in (0.5, 2.0, 10.0):
        km, closed = bm_survival_km(y2, t).value, bm_survival_closed_k2(1.0, t)
        worst = max(worst, abs(km - closed))
        rows.append({"check": "km_vs_reflection", "k": 2, "t": t, "value": km, "reference": closed})
    ctx.check(PropertyCheck(
        name="km_vs_reflection",
        passed=worst <= 1e-8,
        detail=f"max |KM - reflection| = {worst:.3g} at k=2",
    ))

    y3, t = WeylPoint(coords=(0.0, 1.0, 2.0)), 1e4
    km, asymptotic = bm_survival_km(y3, t).value, bm_survival_asymptotic(y3, t)
    rows.append({"check": "km_vs_asymptotic", "k": 3, "t": t, "value": km, "reference": asymptotic})
    ctx.check(PropertyCheck(
        name="km_vs_asymptotic",
        passed=abs(km / asymptotic - 1.0) <= 0.05,
        detail=f"KM / (kappa Delta t^-1.5) = {km / asymptotic:.4f} at k=3, t={t:g}, Delta={vandermonde(y3):g}",
    ))

    lhs, rhs = chapman_kolmogorov_k2(WeylPoint(coords=(0.0, 1.0)), WeylPoint(coords=(0.5, 2.0)), 0.5, 0.7)
    rows.append({"check": "chapman_kolmogorov", "k": 2, "t": 1.2, "value": lhs, "reference": rhs})
    ctx.check(PropertyCheck(
        name="chapman_kolmogorov",
        passed=abs(lhs - rhs) <= 1e-6 * abs(rhs),
        detail=f"int b_s b_t = {lhs:.10g} against b_(s+t) = {rhs:.10g}",
    ))
    ctx.writer.table("brownian", ["check", "k", "t", "value", "reference"], rows)


_HANDLERS: dict[ExperimentKind, Callable[[_Run], None]] = {
    ExperimentKind.TAIL: _tail,
    ExperimentKind.HEAVY_TAIL: _heavy_tail,
    ExperimentKind.V_PROPERTIES: _v_properties,
    ExperimentKind.LIMIT_DIST: _limit_dist,
    ExperimentKind.DYSON_COMPARE: _dyson_compare,
    ExperimentKind.CONSTANTS: _constants,
}


def _record_end(writer: ArtifactWriter, exit_code: int, checks: list[PropertyCheck]) -> None:
    writer.record("end", exit_code=exit_code, checks=len(checks),
                  failed=[check.name for check in checks if not check.passed])


def run_directory(config: ExperimentConfig) -> Path:
    return Path(config.out_dir) / f"{config.kind.value}-{run_id(config.identity_json())}"


def run(config: ExperimentConfig, recipe: RecipeConfig | None = None) -> RunResult:
    """Execute the experiment named by config.kind and persist its artifacts."""
    rid = run_id(config.identity_json())
    run_dir = run_directory(config)
    writer = ArtifactWriter(run_dir, rid)
    dump_config(config, run_dir / "config.yaml")
    writer.record("start", kind=config.kind.value, seed=config.seed, recipe=recipe.name if recipe else None)
    logger.info(f"Run {rid}: {config.kind.value} -> {run_dir}")

    ctx = _Run(config, writer)
    exit_code = EXIT_ERROR
    try:
        _HANDLERS[config.kind](ctx)
        exit_code = EXIT_OK if all_passed(ctx.checks) else EXIT_ACCEPTANCE
    except DegenerateRunError as e:
        logger.error(f"Degenerate run: {e}")
        writer.record("degenerate", error=str(e), diagnostics=e.diagnostics)
        exit_code = EXIT_DEGENERATE
    except Exception as e:
        writer.record("error", error=f"{type(e).__name__}: {e}")
        raise
    finally:
        # checks gathered before a crash are still written
        writer.table("checks", CHECKS_HEADER, [check.as_row() for check in ctx.checks])
        if exit_code == EXIT_ERROR:
            _record_end(writer, exit_code, ctx.checks)

    result = RunResult(exit_code=exit_code, run_dir=run_dir, run_id=rid, checks=ctx.checks, summary=ctx.summary)
    if recipe is not None and recipe.report:
        text = render_report(recipe, {
            "config": config.model_dump(mode="json"),
            "run_id": rid,
            "exit_code": exit_code,
            "passed": result.passed,
            "checks": [check.as_row() for check in ctx.checks],
            "summary": ctx.summary,
        })
        (run_dir / "report.md").write_text(text, encoding="utf-8")
        writer.record("report", file="report.md")
    _record_end(writer, exit_code, ctx.checks)
    logger.info(f"Run {rid} finished with exit code {exit_code}")
    return result
