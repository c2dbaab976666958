"""Compatibility windows, quality scoring, and single-encounter probabilities.

A window of compatibility is a per-trait acceptance interval around the
user's ideal partner values. A group member is a match on a given encounter
when they fall inside every interval of the user's window *and* the user
falls inside the member's own window (mutual fit). Quality measures how
close an accepted member sits to the window centers and is split into
configurable bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import InsufficientDataError, ValidationError

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, types only
    from .population import SubgroupSelection

MONTHS_PER_YEAR = 12.0


@dataclass(frozen=True)
class CompatibilityWindow:
    """Per-trait acceptance intervals with importances and a width drift rate.

    ``drift_rate`` is the signed fractional change of every halfwidth per
    year: widths at time t (years) are ``halfwidth * (1 + drift_rate * t)``,
    floored at zero. Intervals are clamped to [0, 1] when evaluated.
    """

    centers: tuple[float, ...]
    halfwidths: tuple[float, ...]
    importances: tuple[float, ...]
    drift_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        object.__setattr__(self, "halfwidths", tuple(float(h) for h in self.halfwidths))
        object.__setattr__(self, "importances", tuple(float(w) for w in self.importances))
        d = len(self.centers)
        if len(self.halfwidths) != d or len(self.importances) != d:
            raise ValidationError(
                f"window sequences must share one dimension, got centers={d}, "
                f"halfwidths={len(self.halfwidths)}, importances={len(self.importances)}"
            )
        if d == 0:
            raise ValidationError("window dimension must be >= 1")
        if any(h < 0 for h in self.halfwidths):
            raise ValidationError("window halfwidths must be nonnegative")
        if any(w < 0 for w in self.importances):
            raise ValidationError("window importances must be nonnegative")
        if sum(self.importances) <= 0:
            raise ValidationError("window importances must not all be zero")

    @property
    def dim(self) -> int:
        return len(self.centers)

    def centers_array(self) -> np.ndarray:
        return np.asarray(self.centers, dtype=np.float64)

    def halfwidths_array(self) -> np.ndarray:
        return np.asarray(self.halfwidths, dtype=np.float64)

    def importances_array(self) -> np.ndarray:
        return np.asarray(self.importances, dtype=np.float64)

    def scaled(self, factor: float) -> "CompatibilityWindow":
        """Same window with every halfwidth multiplied by ``factor`` >= 0."""
        return CompatibilityWindow(
            centers=self.centers,
            halfwidths=tuple(h * factor for h in self.halfwidths),
            importances=self.importances,
            drift_rate=self.drift_rate,
        )


@dataclass(frozen=True)
class QualityBand:
    """One quality interval. Bands jointly partition (0, 1].

    Membership is lower-exclusive / upper-inclusive, except that the bottom
    band (lower == 0) also takes scores of exactly zero so that every
    accepted match lands in some band and the per-band probabilities sum
    exactly to the total.
    """

    name: str
    lower: float
    upper: float
    ideal: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lower < self.upper <= 1.0:
            raise ValidationError(
                f"band {self.name!r} must satisfy 0 <= lower < upper <= 1, "
                f"got [{self.lower}, {self.upper}]"
            )


DEFAULT_BANDS: tuple[QualityBand, ...] = (
    QualityBand("marginal", 0.0, 0.5),
    QualityBand("good", 0.5, 0.8),
    QualityBand("ideal", 0.8, 1.0, ideal=True),
)


def validate_bands(bands: Sequence[QualityBand]) -> tuple[QualityBand, ...]:
    """Check that ``bands`` form a contiguous partition of (0, 1]."""
    bands = tuple(bands)
    if not bands:
        raise ValidationError("at least one quality band is required")
    ordered = sorted(bands, key=lambda b: b.lower)
    if ordered[0].lower != 0.0 or ordered[-1].upper != 1.0:
        raise ValidationError("quality bands must cover (0, 1]")
    for a, b in zip(ordered, ordered[1:]):
        if a.upper != b.lower:
            raise ValidationError(
                f"quality bands {a.name!r} and {b.name!r} must be contiguous "
                f"(got upper {a.upper} vs lower {b.lower})"
            )
    names = [b.name for b in bands]
    if len(set(names)) != len(names):
        raise ValidationError("quality band names must be unique")
    return bands


@dataclass(frozen=True)
class EncounterProbabilityCurve:
    """Per-band single-encounter match probabilities on a time grid (months)."""

    group_id: str
    grid_months: np.ndarray
    by_band: dict[str, np.ndarray]  # band name -> p_{G,q}(t_k)
    total: np.ndarray = field(init=False)  # p_G(t_k), the exact per-band sum

    def __post_init__(self):
        total = np.zeros_like(np.asarray(self.grid_months, dtype=np.float64))
        for series in self.by_band.values():
            total = total + series
        object.__setattr__(self, "total", total)
        if np.any(self.total < 0) or np.any(self.total > 1 + 1e-12):
            raise ValidationError("encounter probabilities must lie in [0, 1]")


def derive_windows(base: CompatibilityWindow, t_years: float) -> CompatibilityWindow:
    """Window at time ``t_years``: halfwidths scaled by (1 + drift * t), floored at 0."""
    if t_years < 0:
        raise ValidationError("time must be nonnegative")
    factor = max(0.0, 1.0 + base.drift_rate * t_years)
    return base.scaled(factor)


def _window_distances(
    traits: np.ndarray, centers: np.ndarray, halfwidths: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized distances d_i = |trait - center| / halfwidth and the in-window mask.

    Works on (..., D) trait arrays. Zero halfwidths accept only traits exactly
    at the center (d_i = 0); any other trait is out of window.
    """
    diff = np.abs(traits - centers)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(halfwidths > 0, diff / np.where(halfwidths > 0, halfwidths, 1.0), np.inf)
    d = np.where((halfwidths == 0) & (diff == 0), 0.0, d)
    return d, np.all(d <= 1.0, axis=-1)


def in_window_mask(traits: np.ndarray, window: CompatibilityWindow) -> np.ndarray:
    """Boolean mask of rows of ``traits`` (N x D) inside every window interval."""
    traits = np.asarray(traits, dtype=np.float64)
    if traits.shape[-1] != window.dim:
        raise ValidationError(
            f"trait dimension {traits.shape[-1]} does not match window dimension {window.dim}"
        )
    _, mask = _window_distances(traits, window.centers_array(), window.halfwidths_array())
    return mask


def quality_scores(traits: np.ndarray, window: CompatibilityWindow) -> np.ndarray:
    """Quality q = 1 - sqrt(sum_i w_i d_i^2 / sum_i w_i) for each trait row.

    Out-of-window rows get NaN (the out-of-window marker): they never carry
    a score. In-window scores lie in [0, 1]; q = 1 at the centers and q = 0
    exactly on the window edge in every dimension.
    """
    traits = np.asarray(traits, dtype=np.float64)
    if traits.shape[-1] != window.dim:
        raise ValidationError(
            f"trait dimension {traits.shape[-1]} does not match window dimension {window.dim}"
        )
    d, mask = _window_distances(traits, window.centers_array(), window.halfwidths_array())
    w = window.importances_array()
    d_finite = np.where(np.isfinite(d), d, 0.0)
    rms = np.sqrt((d_finite * d_finite) @ w / w.sum())
    q = 1.0 - rms
    return np.where(mask, np.clip(q, 0.0, 1.0), np.nan)


def _traits_of(person_or_traits) -> np.ndarray:
    traits = getattr(person_or_traits, "traits", person_or_traits)
    return np.asarray(traits, dtype=np.float64)


def quality_score(suitor, window: CompatibilityWindow) -> float | None:
    """Scalar quality of one suitor (a Person or a trait sequence), or None
    when out of window."""
    q = quality_scores(_traits_of(suitor)[None, :], window)[0]
    return None if np.isnan(q) else float(q)


def band_counts(
    scores: np.ndarray, bands: Sequence[QualityBand], extra_mask: np.ndarray | None = None
) -> dict[str, int]:
    """Count scores per band. NaN scores (out of window) never count.

    ``extra_mask`` restricts counting to rows where it is True.
    """
    valid = ~np.isnan(scores)
    if extra_mask is not None:
        valid = valid & extra_mask
    counts: dict[str, int] = {}
    for band in bands:
        in_band = valid & (scores > band.lower) & (scores <= band.upper)
        if band.lower == 0.0:
            in_band |= valid & (scores == 0.0)
        counts[band.name] = int(np.count_nonzero(in_band))
    return counts


def encounter_probabilities(
    selection: "SubgroupSelection",
    user,
    window: CompatibilityWindow,
    bands: Sequence[QualityBand],
    grid_months: Sequence[float],
    mean_drift: Sequence[float] | None = None,
) -> EncounterProbabilityCurve:
    """Single-encounter match probability per quality band over the grid.

    ``user`` is a Person-like profile (anything with ``.traits``) or a bare
    trait sequence. At each grid time the member traits are shifted by the
    group's mean demographic drift (per year, clamped to [0, 1]) and the
    user's window is drifted via :func:`derive_windows`. A member counts
    only when both sides accept: the member falls in the user's window and
    the member's own window contains the user's traits.
    """
    members = selection.members
    if len(members) == 0:
        raise InsufficientDataError(
            "cannot estimate encounter probabilities from an empty subgroup",
            relaxation_log=selection.relaxation_log,
            module="matching",
        )
    bands = validate_bands(bands)
    traits = members.traits
    n, dim = traits.shape
    if dim != window.dim:
        raise ValidationError(
            f"member trait dimension {dim} does not match window dimension {window.dim}"
        )
    user = _traits_of(user)
    if user.shape != (dim,):
        raise ValidationError(f"user traits must have dimension {dim}, got {user.shape}")
    drift = (
        np.zeros(dim)
        if mean_drift is None
        else np.asarray(mean_drift, dtype=np.float64).reshape(dim)
    )
    grid = np.asarray(grid_months, dtype=np.float64)

    # Member-side acceptance of the user is time independent: own windows are
    # centered where the member started and do not drift.
    _, accepts_user = _window_distances(user, members.own_centers, members.own_halfwidths)

    by_band: dict[str, np.ndarray] = {band.name: np.zeros(grid.shape) for band in bands}
    for k, t_months in enumerate(grid):
        t_years = t_months / MONTHS_PER_YEAR
        shifted = np.clip(traits + drift * t_years, 0.0, 1.0)
        scores = quality_scores(shifted, derive_windows(window, t_years))
        counts = band_counts(scores, bands, extra_mask=accepts_user)
        for name, count in counts.items():
            by_band[name][k] = count / n
    return EncounterProbabilityCurve(group_id=selection.primary_id, grid_months=grid, by_band=by_band)
