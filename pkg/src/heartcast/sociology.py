"""Interaction rates and cumulative match probability over time.

Encounters per month are modeled per group and folded with the
single-encounter probabilities under the large-population urn limit: the
chance of surviving a step with expected Dn encounters at per-encounter
match probability p is (1 - p)^Dn, with non-integer exponents allowed.
Total probability is attributed across groups and quality bands by
cumulative-hazard fraction, which is exact, additive, and order
independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .matching import EncounterProbabilityCurve, QualityBand
from .population import GroupModel

# Per-encounter hazard used in place of -ln(1 - p) when p == 1 exactly.
# exp(-50) ~ 2e-22, so a single certain encounter still drives C to 1 within
# double precision while keeping every hazard finite.
MAX_ENCOUNTER_HAZARD = 50.0


def _validate_grid(grid_months: Sequence[float]) -> np.ndarray:
    grid = np.asarray(grid_months, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValidationError("time grid must be a one-dimensional sequence")
    if grid[0] != 0.0:
        raise ValidationError("time grid must start at 0")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValidationError("time grid must be strictly increasing")
    return grid


@dataclass(frozen=True)
class EncounterSchedule:
    """Expected encounter rate and cumulative encounters for one group."""

    group_id: str
    grid_months: np.ndarray
    rate: np.ndarray  # expected encounters per month at each grid time
    cumulative: np.ndarray = field(init=False)  # trapezoidal accumulation, 0 at t0

    def __post_init__(self):
        grid = _validate_grid(self.grid_months)
        rate = np.asarray(self.rate, dtype=np.float64)
        if rate.shape != grid.shape:
            raise ValidationError("rate series must align with the grid")
        if np.any(rate < 0):
            raise ValidationError("encounter rates must be nonnegative")
        steps = 0.5 * (rate[1:] + rate[:-1]) * np.diff(grid)
        cumulative = np.concatenate([[0.0], np.cumsum(steps)])
        object.__setattr__(self, "cumulative", cumulative)


def encounter_schedule(
    group: GroupModel, extroversion: float, grid_months: Sequence[float]
) -> EncounterSchedule:
    """Schedule for one group: rate = base * (0.5 + extroversion) * ramp(t).

    Established groups have ramp = 1; new groups ramp in as
    1 - exp(-t / ramp_tau). Cumulative encounters accumulate by trapezoid.
    """
    if not 0.0 <= extroversion <= 1.0:
        raise ValidationError("extroversion must lie in [0, 1]")
    if group.base_encounter_rate < 0:
        raise ValidationError(f"group {group.id!r}: base_encounter_rate must be >= 0")
    grid = _validate_grid(grid_months)
    rate = np.full(grid.shape, group.base_encounter_rate * (0.5 + extroversion))
    if not group.established:
        rate = rate * -np.expm1(-grid / group.ramp_tau)
    return EncounterSchedule(group_id=group.id, grid_months=grid, rate=rate)


@dataclass(frozen=True)
class CumulativeForecast:
    """Total match probability over time with exact group/quality attribution."""

    grid_months: np.ndarray
    total: np.ndarray  # C(t_k)
    by_group: dict[str, np.ndarray]
    by_quality: dict[str, np.ndarray]
    hazard_by_group: dict[str, np.ndarray]
    hazard_by_quality: dict[str, np.ndarray]

    def value_at(self, t_months: float) -> float:
        """C at the last grid point <= t_months (clamped to the horizon)."""
        grid = self.grid_months
        idx = int(np.searchsorted(grid, min(t_months, grid[-1]), side="right") - 1)
        return float(self.total[max(idx, 0)])


def cumulative_forecast(
    curves: Sequence[EncounterProbabilityCurve],
    schedules: Sequence[EncounterSchedule],
    bands: Sequence[QualityBand],
) -> CumulativeForecast:
    """Fold per-group probabilities and schedules into cumulative probability.

    Survival S(t_k) = prod_G prod_{j<=k} (1 - p_G(t_j))^{Dn_G(t_j)} and
    C = 1 - S. Cumulative hazards H_G = sum Dn * (-ln(1 - p_G)) attribute C
    across groups; band fractions p_{G,q}/p_G apportion each step's hazard
    for the quality attribution. Attributed series are (H_X / sum H) * C.
    """
    if not curves or len(curves) != len(schedules):
        raise ValidationError("curves and schedules must be nonempty and aligned")
    by_id = {s.group_id: s for s in schedules}
    if len(by_id) != len(schedules):
        raise ValidationError("schedule group ids must be unique")
    grid = _validate_grid(curves[0].grid_months)
    band_names = [band.name for band in bands]

    n_steps = grid.size
    hazard_by_group: dict[str, np.ndarray] = {}
    hazard_by_quality = {name: np.zeros(n_steps) for name in band_names}

    for curve in curves:
        schedule = by_id.get(curve.group_id)
        if schedule is None:
            raise ValidationError(f"no schedule for group {curve.group_id!r}")
        if not np.array_equal(curve.grid_months, grid) or not np.array_equal(
            schedule.grid_months, grid
        ):
            raise ValidationError("curves and schedules must share one grid")
        if set(curve.by_band) != set(band_names):
            raise ValidationError(
                f"curve for group {curve.group_id!r} does not cover the configured bands"
            )
        p = curve.total
        delta_n = np.diff(schedule.cumulative, prepend=0.0)
        with np.errstate(divide="ignore"):
            per_encounter = np.where(
                p >= 1.0, MAX_ENCOUNTER_HAZARD, -np.log1p(-np.minimum(p, 1.0))
            )
        step_hazard = delta_n * per_encounter
        hazard_by_group[curve.group_id] = np.cumsum(step_hazard)
        with np.errstate(invalid="ignore", divide="ignore"):
            for name in band_names:
                fraction = np.where(p > 0, curve.by_band[name] / np.where(p > 0, p, 1.0), 0.0)
                hazard_by_quality[name] += np.cumsum(step_hazard * fraction)

    hazard_total = np.sum(list(hazard_by_group.values()), axis=0)
    total = -np.expm1(-hazard_total)

    def attribute(hazards: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        safe = np.where(hazard_total > 0, hazard_total, 1.0)
        return {
            key: np.where(hazard_total > 0, h / safe * total, 0.0) for key, h in hazards.items()
        }

    return CumulativeForecast(
        grid_months=grid,
        total=total,
        by_group=attribute(hazard_by_group),
        by_quality=attribute(hazard_by_quality),
        hazard_by_group=hazard_by_group,
        hazard_by_quality=hazard_by_quality,
    )
