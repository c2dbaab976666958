"""End-to-end pipeline: scenario in, valued options and report out.

Stages run in order: population loading and significance, single-encounter
probabilities, encounter schedules and cumulative probability, Monte Carlo
suitors, option utility curves, recommendation and scores. Everything is
deterministic for a fixed scenario and seed; random streams are derived per
stage so no step depends on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .matching import (
    DEFAULT_BANDS,
    MONTHS_PER_YEAR,
    CompatibilityWindow,
    QualityBand,
    encounter_probabilities,
    quality_score,
    quality_scores,
    validate_bands,
)
from .population import (
    DEFAULT_MAX_WIDENINGS,
    DEFAULT_MIN_SAMPLES,
    DEFAULT_WIDEN_FACTOR,
    GroupModel,
    RelaxationStep,
    SubgroupSelection,
    concat_sample_sets,
    ensure_significance,
    intersect_subgroups,
    load_population,
)
from .rng import STREAM_POPULATION, child_seed
from .sociology import CumulativeForecast, EncounterSchedule, cumulative_forecast, encounter_schedule
from .utility import (
    PenaltySummary,
    PersonParams,
    RelationshipParams,
    SingleLifeParams,
    SuitorSample,
    UtilityCurve,
    mirrored_template,
    open_option_utility,
    penalty_profile,
    relationship_utility,
    sample_suitors,
    single_utility,
)

SCHEMA_VERSION = 1

STAY_IN_RELATIONSHIP = "stay_in_relationship"
SINGLE_CLOSED = "single_closed"
SINGLE_OPEN = "single_open"

MIN_TRAIT_DIM = 4


def normalized_amplitudes(values) -> tuple[float, ...]:
    """Amplitudes scaled to sum to one, so utility scales are comparable."""
    arr = np.asarray(values, dtype=np.float64)
    if np.any(arr < 0) or arr.sum() <= 0:
        raise ValidationError("amplitudes must be nonnegative with a positive sum")
    return tuple(arr / arr.sum())


@dataclass(frozen=True)
class UserProfile:
    traits: tuple[float, ...]
    window: CompatibilityWindow
    extroversion: float
    goals: tuple[tuple[float, float], ...]
    tau_single: float
    amplitudes: tuple[float, ...]  # normalized; default from window importances
    sensitivities: tuple[float, ...]
    open_to_dating: bool = True

    def __post_init__(self):
        d = len(self.traits)
        if self.window.dim != d or len(self.amplitudes) != d or len(self.sensitivities) != d:
            raise ValidationError("user profile sequences must share the trait dimension")
        if any(not 0.0 <= t <= 1.0 for t in self.traits):
            raise ValidationError("user traits must lie in [0, 1]")
        if not 0.0 <= self.extroversion <= 1.0:
            raise ValidationError("extroversion must lie in [0, 1]")


@dataclass(frozen=True)
class RelationshipSpec:
    partner_traits: tuple[float, ...]
    partner_window: CompatibilityWindow
    partner_amplitudes: tuple[float, ...]  # normalized; default from partner importances
    partner_sensitivities: tuple[float, ...]
    status: str = "current"  # "current" | "past" (a hypothetical/repeated relationship)

    def __post_init__(self):
        d = len(self.partner_traits)
        if (
            self.partner_window.dim != d
            or len(self.partner_amplitudes) != d
            or len(self.partner_sensitivities) != d
        ):
            raise ValidationError("relationship sequences must share the trait dimension")
        if self.status not in ("current", "past"):
            raise ValidationError(f"relationship status must be 'current' or 'past', got {self.status!r}")


@dataclass(frozen=True)
class McConfig:
    suitors: int = 2000
    realizations: int = 1000

    def __post_init__(self):
        if self.suitors < 1 or self.realizations < 1:
            raise ValidationError("mc.suitors and mc.realizations must be >= 1")


@dataclass(frozen=True)
class SignificanceConfig:
    min_samples: int = DEFAULT_MIN_SAMPLES
    widen_factor: float = DEFAULT_WIDEN_FACTOR
    max_widenings: int = DEFAULT_MAX_WIDENINGS


@dataclass(frozen=True)
class Scenario:
    """A fully validated forecasting scenario."""

    seed: int
    horizon_years: float
    user: UserProfile
    groups: tuple[GroupModel, ...]
    grid_step_months: float = 1.0
    mc: McConfig = field(default_factory=McConfig)
    relationship: RelationshipSpec | None = None
    bands: tuple[QualityBand, ...] = DEFAULT_BANDS
    significance: SignificanceConfig = field(default_factory=SignificanceConfig)
    social_reference_volume: float = 1000.0

    def __post_init__(self):
        if len(self.user.traits) < MIN_TRAIT_DIM:
            raise ValidationError(f"scenarios require at least {MIN_TRAIT_DIM} trait dimensions")
        if self.horizon_years <= 0:
            raise ValidationError("horizon_years must be > 0")
        if self.grid_step_months <= 0:
            raise ValidationError("grid_step_months must be > 0")
        if not self.groups:
            raise ValidationError("at least one group is required")
        ids = [g.id for g in self.groups]
        if len(set(ids)) != len(ids):
            raise ValidationError("group ids must be unique")
        if self.social_reference_volume <= 0:
            raise ValidationError("social reference volume must be > 0")
        validate_bands(self.bands)
        n = self.horizon_years * MONTHS_PER_YEAR / self.grid_step_months
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            raise ValidationError("horizon must be a positive whole number of grid steps")

    def grid_months(self) -> np.ndarray:
        n = round(self.horizon_years * MONTHS_PER_YEAR / self.grid_step_months)
        return np.arange(n + 1, dtype=np.float64) * self.grid_step_months

    @property
    def current_option(self) -> str:
        """The option kind matching the user's present situation (tie-break)."""
        if self.relationship is not None and self.relationship.status == "current":
            return STAY_IN_RELATIONSHIP
        return SINGLE_OPEN if self.user.open_to_dating else SINGLE_CLOSED


@dataclass(frozen=True)
class OptionForecast:
    kind: str
    curve: UtilityCurve
    value: float  # time-averaged utility over the horizon


@dataclass(frozen=True)
class Recommendation:
    option: str
    margin: float
    note: str


@dataclass(frozen=True)
class Scores:
    selectivity: float
    social_growth: float
    opportunity_1y: float
    opportunity_5y: float
    opportunity_10y: float
    partner_quality_percentile: float | None


@dataclass(frozen=True)
class Report:
    schema_version: int
    seed: int
    grid_months: np.ndarray
    cumulative: CumulativeForecast
    options: tuple[OptionForecast, ...]
    recommendation: Recommendation
    scores: Scores
    penalty: PenaltySummary
    relaxation_logs: dict[str, tuple[RelaxationStep, ...]]


def time_average(curve: UtilityCurve) -> float:
    """Undiscounted time-averaged utility, V = (1/T) integral of U dt."""
    grid = curve.grid_months
    if grid.size < 2:
        return float(curve.mean[0])
    return float(np.trapezoid(curve.mean, grid) / (grid[-1] - grid[0]))


def recommend(options: tuple[OptionForecast, ...], current_option: str) -> Recommendation:
    """Pick the option with maximal value; exact ties keep the status quo."""
    if not options:
        raise ValidationError("at least one option is required")
    ranked = sorted(
        enumerate(options),
        key=lambda io: (-io[1].value, 0 if io[1].kind == current_option else 1, io[0]),
    )
    best = ranked[0][1]
    if len(options) == 1:
        return Recommendation(option=best.kind, margin=0.0, note="only one option evaluated")
    runner = ranked[1][1]
    margin = best.value - runner.value

    def bounds(option: OptionForecast) -> tuple[np.ndarray, np.ndarray]:
        low = option.curve.p10 if option.curve.p10 is not None else option.curve.mean
        high = option.curve.p90 if option.curve.p90 is not None else option.curve.mean
        return low, high

    best_low, best_high = bounds(best)
    run_low, run_high = bounds(runner)
    overlap = bool(np.any((best_low <= run_high) & (run_low <= best_high)))
    if overlap:
        note = f"uncertainty ranges overlap the runner-up ({runner.kind}); margins are soft"
    else:
        note = f"clear separation from the runner-up ({runner.kind})"
    return Recommendation(option=best.kind, margin=margin, note=note)


def _pool_selections(selections: list[SubgroupSelection]) -> SubgroupSelection:
    members = concat_sample_sets([s.members for s in selections])
    ids = tuple(i for s in selections for i in s.source_ids)
    return SubgroupSelection(source_ids=ids, filters={}, pool=members, members=members)


def build_report(
    scenario: Scenario,
    cumulative: CumulativeForecast,
    schedules: list[EncounterSchedule],
    selections: list[SubgroupSelection],
    curves_p0: list[float],
    options: tuple[OptionForecast, ...],
    suitors: SuitorSample,
) -> Report:
    """Assemble the report: recommendation plus the synthetic scores."""
    recommendation = recommend(options, scenario.current_option)

    weights = np.asarray([len(s.members) for s in selections], dtype=np.float64)
    p0 = np.asarray(curves_p0)
    selectivity = float(1.0 - (weights @ p0) / weights.sum())

    horizon_encounters = sum(float(s.cumulative[-1]) for s in schedules)
    social_growth = horizon_encounters / scenario.social_reference_volume

    partner_percentile = None
    penalty_partner = None
    if scenario.relationship is not None:
        penalty_partner = scenario.relationship.partner_traits
        partner_q = quality_score(penalty_partner, scenario.user.window)
        suitor_q = quality_scores(suitors.suitors, scenario.user.window)
        suitor_q = np.where(np.isnan(suitor_q), -np.inf, suitor_q)
        threshold = -np.inf if partner_q is None else partner_q
        partner_percentile = float(np.mean(suitor_q < threshold))

    penalty = penalty_profile(
        suitors, scenario.user.window, scenario.user.sensitivities, penalty_partner
    )

    return Report(
        schema_version=SCHEMA_VERSION,
        seed=scenario.seed,
        grid_months=scenario.grid_months(),
        cumulative=cumulative,
        options=options,
        recommendation=recommendation,
        scores=Scores(
            selectivity=selectivity,
            social_growth=social_growth,
            opportunity_1y=cumulative.value_at(12.0),
            opportunity_5y=cumulative.value_at(60.0),
            opportunity_10y=cumulative.value_at(120.0),
            partner_quality_percentile=partner_percentile,
        ),
        penalty=penalty,
        relaxation_logs={s.primary_id: tuple(s.relaxation_log) for s in selections},
    )


def run_forecast(scenario: Scenario) -> Report:
    """Run the full pipeline for one scenario. Deterministic per seed."""
    grid = scenario.grid_months()
    user = scenario.user

    selections: list[SubgroupSelection] = []
    curves = []
    schedules = []
    for index, group in enumerate(scenario.groups):
        samples = load_population(group, seed=child_seed(scenario.seed, STREAM_POPULATION, index))
        selection = intersect_subgroups([samples], group.demographic_filters)
        selection = ensure_significance(
            selection,
            user.window,
            min_samples=scenario.significance.min_samples,
            widen_factor=scenario.significance.widen_factor,
            max_widenings=scenario.significance.max_widenings,
        )
        selections.append(selection)
        curves.append(
            encounter_probabilities(
                selection, user.traits, selection.window, scenario.bands, grid, group.mean_drift
            )
        )
        schedules.append(encounter_schedule(group, user.extroversion, grid))

    cumulative = cumulative_forecast(curves, schedules, scenario.bands)

    pooled = _pool_selections(selections)
    suitors = sample_suitors(pooled, scenario.mc.suitors, scenario.seed)

    single = SingleLifeParams(goals=user.goals, tau_single=user.tau_single)
    years = grid / MONTHS_PER_YEAR

    options: list[OptionForecast] = []
    if scenario.relationship is not None:
        rel = scenario.relationship
        params = RelationshipParams(
            person1=PersonParams(
                amplitudes=user.amplitudes,
                sensitivities=user.sensitivities,
                ideals=user.window.centers,
                traits=user.traits,
            ),
            person2=PersonParams(
                amplitudes=rel.partner_amplitudes,
                sensitivities=rel.partner_sensitivities,
                ideals=rel.partner_window.centers,
                traits=rel.partner_traits,
            ),
        )
        stay_curve = UtilityCurve(grid_months=grid, mean=relationship_utility(params, years))
        options.append(
            OptionForecast(STAY_IN_RELATIONSHIP, stay_curve, time_average(stay_curve))
        )

    closed_curve = UtilityCurve(grid_months=grid, mean=single_utility(single, years))
    options.append(OptionForecast(SINGLE_CLOSED, closed_curve, time_average(closed_curve)))

    template = mirrored_template(
        user.traits, user.window.centers, user.amplitudes, user.sensitivities
    )
    open_curve = open_option_utility(
        cumulative, suitors, template, single, scenario.mc.realizations, scenario.seed
    )
    options.append(OptionForecast(SINGLE_OPEN, open_curve, time_average(open_curve)))

    return build_report(
        scenario,
        cumulative,
        schedules,
        selections,
        [float(c.total[0]) for c in curves],
        tuple(options),
        suitors,
    )
