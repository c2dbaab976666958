"""Utility functionals and Monte Carlo suitor machinery.

Relationship worth is a compound-depreciation functional: each person
contributes a sum of amplitude terms decaying at rates proportional to the
mismatch between their ideals and the other person's traits, and the two
sides multiply. Single life is a sustainable-fraction decay over weighted
life goals. Utilities are in arbitrary units; only comparisons between
options matter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientDataError, ValidationError
from .matching import MONTHS_PER_YEAR, CompatibilityWindow
from .population import SubgroupSelection
from .rng import STREAM_ROLLOUTS, STREAM_SUITORS, child_rng, gaussian_draws
from .sociology import CumulativeForecast


@dataclass(frozen=True)
class PersonParams:
    """One side of a relationship: amplitudes, decay sensitivities, ideals, traits."""

    amplitudes: tuple[float, ...]
    sensitivities: tuple[float, ...]
    ideals: tuple[float, ...]
    traits: tuple[float, ...]

    def __post_init__(self):
        d = len(self.amplitudes)
        if not d or len(self.sensitivities) != d or len(self.ideals) != d or len(self.traits) != d:
            raise ValidationError("person parameter sequences must share one dimension >= 1")
        if any(a < 0 for a in self.amplitudes) or sum(self.amplitudes) <= 0:
            raise ValidationError("amplitudes must be nonnegative with a positive sum")
        if any(w < 0 for w in self.sensitivities):
            raise ValidationError("sensitivities must be nonnegative")


@dataclass(frozen=True)
class RelationshipParams:
    """Both sides of a (possible) relationship."""

    person1: PersonParams
    person2: PersonParams

    def __post_init__(self):
        if len(self.person1.amplitudes) != len(self.person2.amplitudes):
            raise ValidationError("both persons must share the trait dimension")


@dataclass(frozen=True)
class SingleLifeParams:
    """Weighted life goals with per-goal sustainability plus a decay scale (years)."""

    goals: tuple[tuple[float, float], ...]  # (weight g_i >= 0, sustainability s_i in [0, 1])
    tau_single: float

    def __post_init__(self):
        if not self.goals:
            raise ValidationError("at least one life goal is required")
        if any(g < 0 for g, _ in self.goals) or sum(g for g, _ in self.goals) <= 0:
            raise ValidationError("goal weights must be nonnegative with a positive sum")
        if any(not 0.0 <= s <= 1.0 for _, s in self.goals):
            raise ValidationError("goal sustainability must lie in [0, 1]")
        if self.tau_single <= 0:
            raise ValidationError("tau_single must be > 0")


@dataclass(frozen=True)
class UtilityCurve:
    """Utility over the month grid; p10/p90 band only for stochastic options."""

    grid_months: np.ndarray
    mean: np.ndarray
    p10: np.ndarray | None = None
    p90: np.ndarray | None = None

    def __post_init__(self):
        if (self.p10 is None) != (self.p90 is None):
            raise ValidationError("p10 and p90 must be given together")
        if self.p10 is not None:
            if np.any(self.p10 > self.mean + 1e-12) or np.any(self.p90 < self.mean - 1e-12):
                raise ValidationError("band must bracket the mean pointwise")


@dataclass(frozen=True)
class SuitorSample:
    """Monte Carlo suitors drawn from the occupied personality space."""

    suitors: np.ndarray  # (count, D), every value in [0, 1]
    source_ids: tuple[str, ...]
    seed: int

    def __post_init__(self):
        suitors = np.asarray(self.suitors, dtype=np.float64)
        if suitors.ndim != 2:
            raise ValidationError("suitors must be a (count, D) matrix")
        if suitors.size and (suitors.min() < 0.0 or suitors.max() > 1.0):
            raise ValidationError("suitor traits must lie in [0, 1]")
        suitors.flags.writeable = False
        object.__setattr__(self, "suitors", suitors)

    def __len__(self) -> int:
        return self.suitors.shape[0]


def relationship_utility(params: RelationshipParams, t_years):
    """U(t) = prod_g sum_i a_{g,i} exp(-w_{g,i} |ideal_{g,i} - trait_{other,i}| t).

    The mismatch on each side compares that person's ideals against the
    *other* person's traits, which reduces to the plain trait gap when each
    person's ideals coincide with their own traits. Accepts scalar or array
    ``t_years``; nonincreasing in t.
    """
    t = np.asarray(t_years, dtype=np.float64)
    if np.any(t < 0):
        raise ValidationError("time must be nonnegative")
    sides = []
    pairs = (
        (params.person1, params.person2),
        (params.person2, params.person1),
    )
    for person, other in pairs:
        a = np.asarray(person.amplitudes)
        w = np.asarray(person.sensitivities)
        delta = np.abs(np.asarray(person.ideals) - np.asarray(other.traits))
        sides.append(np.exp(-np.multiply.outer(t, w * delta)) @ a)
    result = sides[0] * sides[1]
    return float(result) if result.ndim == 0 else result


def single_utility(params: SingleLifeParams, t_years):
    """U_single(t) = sum_i g_i (s_i + (1 - s_i) exp(-t / tau_single)).

    Positive, nonincreasing, with asymptote sum_i g_i s_i (the sustainable
    part of the user's goals). Accepts scalar or array ``t_years``.
    """
    t = np.asarray(t_years, dtype=np.float64)
    if np.any(t < 0):
        raise ValidationError("time must be nonnegative")
    g = np.asarray([g for g, _ in params.goals])
    s = np.asarray([s for _, s in params.goals])
    result = g @ s + np.exp(-t / params.tau_single) * (g @ (1.0 - s))
    return float(result) if result.ndim == 0 else result


def sample_suitors(selection: SubgroupSelection, count: int, seed: int) -> SuitorSample:
    """Draw ``count`` pseudorandom suitors via PCA of the member trait cloud.

    The member mean and covariance are eigendecomposed and suitors are drawn
    as mean + sum_k z_k sqrt(l_k) v_k with standard-normal z, clipped to
    [0, 1] per dimension, so generated suitors are the *probable* ones, not
    ideal ones. Deterministic per (selection, count, seed). A degenerate
    covariance collapses every suitor onto the mean.
    """
    members = selection.members
    dim = members.dim
    if count < 1:
        raise ValidationError("suitor count must be >= 1")
    if len(members) < dim + 1:
        raise InsufficientDataError(
            f"need at least {dim + 1} members to estimate the personality space, "
            f"got {len(members)}",
            relaxation_log=selection.relaxation_log,
            module="utility",
        )
    traits = members.traits
    mean = traits.mean(axis=0)
    cov = np.atleast_2d(np.cov(traits, rowvar=False, ddof=1))
    rng = child_rng(seed, STREAM_SUITORS)
    draws = gaussian_draws(rng, mean, cov, count)
    return SuitorSample(suitors=draws, source_ids=selection.source_ids, seed=seed)


@dataclass(frozen=True)
class PenaltySummary:
    """Trait-averaged decay rates over the Monte Carlo suitors."""

    mean: float
    std: float
    partner: float | None = None


def penalty_profile(
    suitors: SuitorSample,
    window: CompatibilityWindow,
    sensitivities: Sequence[float],
    partner_traits: Sequence[float] | None = None,
) -> PenaltySummary:
    """Average and spread of the per-suitor penalty rate, optionally vs a partner.

    The penalty of a candidate s is the trait-averaged utility decay rate
    (1/D) sum_i w_i |center_i - s_i|; it drives compound depreciation, so a
    lower penalty means a slower-fading relationship.
    """
    w = np.asarray(sensitivities, dtype=np.float64)
    centers = window.centers_array()
    if w.shape != centers.shape:
        raise ValidationError("sensitivities must match the window dimension")
    if suitors.suitors.shape[1] != centers.shape[0]:
        raise ValidationError("suitor dimension must match the window dimension")
    rates = np.abs(centers - suitors.suitors) @ w / centers.shape[0]
    partner = None
    if partner_traits is not None:
        p = np.asarray(partner_traits, dtype=np.float64)
        if p.shape != centers.shape:
            raise ValidationError("partner traits must match the window dimension")
        partner = float(np.abs(centers - p) @ w / centers.shape[0])
    return PenaltySummary(mean=float(rates.mean()), std=float(rates.std()), partner=partner)


def open_option_utility(
    forecast: CumulativeForecast,
    suitors: SuitorSample,
    relationship_template: Callable[[tuple[float, ...]], RelationshipParams],
    single: SingleLifeParams,
    realizations: int,
    seed: int,
) -> UtilityCurve:
    """Expected utility of staying open: single life until a match arrives.

    The mean curve is the exact mixture
    ``(1 - C(t_k)) U_single(t_k) + sum_{j<=k} dC(t_j) Ubar(t_k - t_j)`` with
    Ubar the suitor-averaged relationship utility at the given relationship
    age. The p10/p90 band comes from ``realizations`` independent rollouts,
    each sampling a match time from dC (or no match) and one suitor
    uniformly; rollout streams are derived per realization index, so results
    do not depend on evaluation order. The band is widened, where needed, to
    bracket the closed-form mean.
    """
    if realizations < 1:
        raise ValidationError("realizations must be >= 1")
    grid = forecast.grid_months
    n = grid.size
    total = forecast.total
    delta_c = np.clip(np.diff(total, prepend=0.0), 0.0, None)
    if len(suitors) == 0:
        if np.any(delta_c > 0):
            raise ValidationError("cannot value the open option without suitors when C > 0")
        suitor_traits = np.zeros((0, 1))
    else:
        suitor_traits = suitors.suitors

    years = grid / MONTHS_PER_YEAR
    single_curve = single_utility(single, years)

    # Relationship ages t_k - t_j appearing in the mixture, deduplicated.
    age_matrix = np.maximum(grid[:, None] - grid[None, :], 0.0)
    ages, age_index = np.unique(age_matrix, return_inverse=True)
    age_index = age_index.reshape(n, n)
    suitor_curves = np.empty((len(suitors), ages.size))
    for s in range(len(suitors)):
        params = relationship_template(tuple(suitor_traits[s]))
        suitor_curves[s] = relationship_utility(params, ages / MONTHS_PER_YEAR)

    mean_curve = (1.0 - total) * single_curve
    if len(suitors):
        ubar = suitor_curves.mean(axis=0)
        for k in range(n):
            mean_curve[k] += delta_c[: k + 1] @ ubar[age_index[k, : k + 1]]

    # Rollouts: categorical over (match at step j, no match by the horizon).
    edges = np.concatenate([np.cumsum(delta_c), [1.0]])
    edges = np.minimum(edges, 1.0)
    match_step = np.empty(realizations, dtype=np.int64)
    suitor_pick = np.zeros(realizations, dtype=np.int64)
    for r in range(realizations):
        rng = child_rng(seed, STREAM_ROLLOUTS, r)
        match_step[r] = np.searchsorted(edges, rng.random(), side="right")
        if len(suitors):
            suitor_pick[r] = rng.integers(0, len(suitors))

    rollout = np.tile(single_curve, (realizations, 1))
    for j in range(n):
        rows = np.flatnonzero(match_step == j)
        if rows.size == 0:
            continue
        cols = age_index[j:, j]
        rollout[rows[:, None], np.arange(j, n)[None, :]] = suitor_curves[
            np.ix_(suitor_pick[rows], cols)
        ]
    p10, p90 = np.percentile(rollout, [10.0, 90.0], axis=0)
    return UtilityCurve(
        grid_months=grid,
        mean=mean_curve,
        p10=np.minimum(p10, mean_curve),
        p90=np.maximum(p90, mean_curve),
    )


def mirrored_template(
    user_traits: Sequence[float],
    user_ideals: Sequence[float],
    user_amplitudes: Sequence[float],
    user_sensitivities: Sequence[float],
) -> Callable[[tuple[float, ...]], RelationshipParams]:
    """Relationship-parameter builder for suitors whose own side is unknown.

    The suitor mirrors the user's amplitudes and sensitivities and wants a
    partner like themselves (ideals = own traits), so both decay rates reduce
    to the user-suitor trait gap. Outputs built from a mirrored side should
    be read as lower-confidence.
    """
    user = PersonParams(
        amplitudes=tuple(user_amplitudes),
        sensitivities=tuple(user_sensitivities),
        ideals=tuple(user_ideals),
        traits=tuple(user_traits),
    )

    def build(suitor_traits: tuple[float, ...]) -> RelationshipParams:
        suitor = PersonParams(
            amplitudes=user.amplitudes,
            sensitivities=user.sensitivities,
            ideals=tuple(suitor_traits),
            traits=tuple(suitor_traits),
        )
        return RelationshipParams(person1=user, person2=suitor)

    return build
