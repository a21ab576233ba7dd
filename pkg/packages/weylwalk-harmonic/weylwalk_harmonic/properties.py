"""
Executable property checks for V and V^(T).

Each check runs its own estimates and returns a PropertyCheck; nothing
here raises on a failed property.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from weylwalk_core import Estimate, WeylPoint, perturbed_vandermonde, vandermonde
from weylwalk_core.errors import ArgumentError
from weylwalk_walks import DEFAULT_BLOCK_SIZE, RngStream, StepLaw, StopRule

from .invariant import (
    VEstimate,
    PathFront,
    estimate_v_stopped,
    estimate_vT_curve,
)

logger = logging.getLogger(__name__)


@dataclass
class PropertyCheck:
    """Outcome of one property check."""

    name: str
    passed: bool
    detail: str
    values: dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> dict[str, Any]:
        return {"property": self.name, "passed": self.passed, "detail": self.detail}


def _v_at(
    points: Sequence[WeylPoint],
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> list[VEstimate]:
    return [
        estimate_v_stopped(x, law, horizon, samples, rng.substream(i))
        for i, x in enumerate(points)
    ]


def dominates(x: WeylPoint, y: WeylPoint) -> bool:
    """Every adjacent gap of y is at least the corresponding gap of x."""
    return x.k == y.k and all(gy >= gx for gx, gy in zip(x.gaps(), y.gaps()))


def check_monotonicity(
    pairs: Sequence[tuple[WeylPoint, WeylPoint]],
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> PropertyCheck:
    """V(x) <= V(y) + 3 combined stderr for gap-dominated pairs."""
    for x, y in pairs:
        if not dominates(x, y):
            raise ArgumentError(f"{y.coords} does not dominate {x.coords} gap-wise")
    failures = []
    for i, (x, y) in enumerate(pairs):
        vx, vy = _v_at([x, y], law, horizon, samples, rng.substream(i))
        diff = vx.v_hat.minus(vy.v_hat)
        if diff.value > 3 * diff.stderr:
            failures.append((x.coords, y.coords, diff.value, diff.stderr))
    return PropertyCheck(
        name="monotone",
        passed=not failures,
        detail=f"{len(pairs) - len(failures)}/{len(pairs)} pairs ordered",
        values={"failures": failures},
    )


def calibrate_bound_constant(
    points: Sequence[WeylPoint],
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> float:
    """c = max (V + 3 stderr)/Delta_1 over a coarse grid; frozen afterwards."""
    estimates = _v_at(points, law, horizon, samples, rng)
    ratios = [
        (v.value + 3 * v.v_hat.stderr) / perturbed_vandermonde(x, 1.0)
        for x, v in zip(points, estimates)
    ]
    c = max(ratios)
    logger.info(f"Calibrated V <= c Delta_1 for {law.descriptor}: c = {c:.4g}")
    return c


def check_bound(
    points: Sequence[WeylPoint],
    c: float,
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> PropertyCheck:
    """V(x) - 3 stderr <= c Delta_1(x) on every point."""
    estimates = _v_at(points, law, horizon, samples, rng)
    excess = [
        (v.value - 3 * v.v_hat.stderr) / perturbed_vandermonde(x, 1.0)
        for x, v in zip(points, estimates)
    ]
    worst = max(excess)
    return PropertyCheck(
        name="bounded_by_delta_1",
        passed=worst <= c,
        detail=f"max (V - 3se)/Delta_1 = {worst:.4g} against c = {c:.4g}",
        values={"c": c, "worst": worst},
    )


def check_asymptotic_ratio(
    k: int,
    spacings: Sequence[float],
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
    tolerance: float = 0.1,
) -> PropertyCheck:
    """V(x)/Delta(x) -> 1 along x = (0, R, 2R, ...); asserted at the largest R."""
    points = [WeylPoint.from_gaps([r] * (k - 1)) for r in spacings]
    estimates = _v_at(points, law, horizon, samples, rng)
    ratios = [v.value / vandermonde(x) for x, v in zip(points, estimates)]
    last = ratios[-1]
    return PropertyCheck(
        name="asymptotic_to_delta",
        passed=abs(last - 1.0) <= tolerance,
        detail=f"V/Delta = {last:.4f} at R = {spacings[-1]:g}",
        values={"spacings": list(spacings), "ratios": ratios},
    )


def check_positivity(
    points: Sequence[WeylPoint],
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> PropertyCheck:
    """V(x) - 3 stderr > 0 everywhere tested."""
    estimates = _v_at(points, law, horizon, samples, rng)
    lows = [v.value - 3 * v.v_hat.stderr for v in estimates]
    return PropertyCheck(
        name="positive",
        passed=min(lows) > 0,
        detail=f"min V - 3se = {min(lows):.4g} over {len(points)} points",
        values={"lower_bounds": lows},
    )


def check_vT_submartingale(
    x: WeylPoint,
    law: StepLaw,
    horizons: Sequence[int],
    samples: int,
    rng: RngStream,
    n_sigma: float = 2.0,
) -> PropertyCheck:
    """E[Delta(x + S_n); T > n] is non-decreasing in n (within n_sigma)."""
    curve = estimate_vT_curve(x, law, list(horizons), samples, rng)
    drops = []
    for (n0, a), (n1, b) in zip(curve, curve[1:]):
        diff = a.v_hat.minus(b.v_hat)
        if diff.value > n_sigma * diff.stderr:
            drops.append((n0, n1, diff.value))
    return PropertyCheck(
        name="vT_submartingale",
        passed=not drops,
        detail=f"{len(drops)} significant decreases over horizons {list(horizons)}",
        values={"curve": [(n, v.value, v.v_hat.stderr) for n, v in curve]},
    )


def check_vT_lower_bound(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
) -> PropertyCheck:
    """Delta(x) <= V^(T)(x): the time-n estimate is at least Delta(x) - 3 stderr."""
    (_, vt), = estimate_vT_curve(x, law, [n], samples, rng)
    delta = vandermonde(x)
    return PropertyCheck(
        name="vT_at_least_delta",
        passed=vt.value + 3 * vt.v_hat.stderr >= delta,
        detail=f"V^(T) ~ {vt.value:.4g} +- {vt.v_hat.stderr:.2g} against Delta = {delta:.4g}",
        values={"vT": vt.value, "delta": delta},
    )


def martingale_split(
    x: WeylPoint,
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> tuple[Estimate, Estimate, Estimate]:
    """(exit part, survival part, their per-path sum) on common paths.

    exit part = E[Delta(x + S_tau); tau <= N], survival part =
    E[Delta(x + S_N); tau > N]; the sum has expectation Delta(x).
    """
    front = PathFront(x.as_array(), samples, law, rng, StopRule.TAU, DEFAULT_BLOCK_SIZE, 1)
    front.advance(horizon)
    stopped, alive = front.delta_stopped(), front.delta_alive()
    return (
        Estimate.from_samples(stopped),
        Estimate.from_samples(alive),
        Estimate.from_samples(stopped + alive),
    )


def check_martingale_split(
    x: WeylPoint,
    law: StepLaw,
    horizon: int,
    samples: int,
    rng: RngStream,
) -> PropertyCheck:
    exit_part, survival_part, total = martingale_split(x, law, horizon, samples, rng)
    delta = vandermonde(x)
    return PropertyCheck(
        name="martingale_split",
        passed=total.agrees_with(delta),
        detail=(
            f"{exit_part.value:.4g} + {survival_part.value:.4g} = {total.value:.4g} "
            f"+- {total.stderr:.2g} against Delta = {delta:.4g}"
        ),
        values={"exit": exit_part.value, "survival": survival_part.value, "delta": delta},
    )


def overshoot_ratio(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
) -> Estimate:
    """E[Delta(x + S_T); T <= n] / Delta(x); never positive, small for x in W_{n,eps}."""
    front = PathFront(x.as_array(), samples, law, rng, StopRule.T, DEFAULT_BLOCK_SIZE, 1)
    front.advance(n)
    return Estimate.from_samples(front.delta_stopped() / vandermonde(x))


def check_overshoot(
    x: WeylPoint,
    law: StepLaw,
    n: int,
    samples: int,
    rng: RngStream,
    tolerance: float = 0.05,
) -> PropertyCheck:
    ratio = overshoot_ratio(x, law, n, samples, rng)
    return PropertyCheck(
        name="sign_change_overshoot",
        passed=ratio.value <= 3 * ratio.stderr and abs(ratio.value) <= tolerance,
        detail=f"E[Delta at T; T <= {n}]/Delta(x) = {ratio.value:.4g} +- {ratio.stderr:.2g}",
        values={"ratio": ratio.value, "stderr": ratio.stderr},
    )


def all_passed(checks: Sequence[PropertyCheck]) -> bool:
    return bool(np.all([c.passed for c in checks]))
