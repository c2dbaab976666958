"""Subgroup populations: loading, synthesis, intersection, significance.

Populations are stored column-wise (trait matrix, own-window halfwidth
matrix, demographic columns) so downstream probability passes stay
vectorized; :class:`Person` is a lightweight row view. Every synthetic
person carries their own compatibility window centered on their own traits,
which models the suitor side of mutual acceptance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import IngestionError, InsufficientDataError, ValidationError
from .matching import CompatibilityWindow, in_window_mask
from .rng import child_rng, gaussian_draws, validated_covariance

DEFAULT_MIN_SAMPLES = 200
DEFAULT_WIDEN_FACTOR = 1.25
DEFAULT_MAX_WIDENINGS = 5


@dataclass(frozen=True)
class Person:
    """One individual: traits, their own partner requirements, demographics."""

    traits: tuple[float, ...]
    own_window: CompatibilityWindow
    demographics: dict

    def __post_init__(self):
        if self.own_window.dim != len(self.traits):
            raise ValidationError("own_window dimension must equal trait dimension")


class SampleSet(Sequence[Person]):
    """Immutable, column-major collection of persons.

    ``own_centers`` equals ``traits``: each person's acceptance window is
    centered on who they are.
    """

    def __init__(
        self,
        traits: np.ndarray,
        own_halfwidths: np.ndarray,
        demographics: dict[str, tuple] | None = None,
        group_id: str | None = None,
    ):
        traits = np.ascontiguousarray(traits, dtype=np.float64)
        own_halfwidths = np.ascontiguousarray(own_halfwidths, dtype=np.float64)
        if traits.ndim != 2:
            raise ValidationError(f"traits must be an (N, D) matrix, got shape {traits.shape}")
        if own_halfwidths.shape != traits.shape:
            raise ValidationError(
                f"own_halfwidths shape {own_halfwidths.shape} must match traits {traits.shape}"
            )
        if traits.size and (traits.min() < 0.0 or traits.max() > 1.0):
            raise ValidationError("trait values must lie in [0, 1]")
        if own_halfwidths.size and own_halfwidths.min() < 0.0:
            raise ValidationError("own-window halfwidths must be nonnegative")
        traits.flags.writeable = False
        own_halfwidths.flags.writeable = False
        self._traits = traits
        self._own_halfwidths = own_halfwidths
        demographics = demographics or {}
        n = traits.shape[0]
        for name, column in demographics.items():
            if len(column) != n:
                raise ValidationError(
                    f"demographic column {name!r} has {len(column)} values for {n} persons"
                )
        self._demographics = {name: tuple(col) for name, col in demographics.items()}
        self.group_id = group_id
        self._row_keys: list | None = None

    @property
    def traits(self) -> np.ndarray:
        return self._traits

    @property
    def own_halfwidths(self) -> np.ndarray:
        return self._own_halfwidths

    @property
    def own_centers(self) -> np.ndarray:
        return self._traits

    @property
    def demographics(self) -> dict[str, tuple]:
        return self._demographics

    @property
    def dim(self) -> int:
        return self._traits.shape[1]

    def __len__(self) -> int:
        return self._traits.shape[0]

    def __getitem__(self, index):
        if isinstance(index, slice):
            return self.subset(range(*index.indices(len(self))))
        i = int(index)
        traits = tuple(self._traits[i])
        window = CompatibilityWindow(
            centers=traits,
            halfwidths=tuple(self._own_halfwidths[i]),
            importances=(1.0,) * self.dim,
        )
        demo = {name: col[i] for name, col in self._demographics.items()}
        return Person(traits=traits, own_window=window, demographics=demo)

    def subset(self, indices: Iterable[int]) -> "SampleSet":
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        demo = {name: tuple(col[i] for i in idx) for name, col in self._demographics.items()}
        return SampleSet(self._traits[idx], self._own_halfwidths[idx], demo, self.group_id)

    def row_keys(self) -> list:
        """Value-identity keys used for intersection and deduplication."""
        if self._row_keys is None:
            demo_names = sorted(self._demographics)
            keys = []
            for i in range(len(self)):
                demo = tuple((name, self._demographics[name][i]) for name in demo_names)
                keys.append((self._traits[i].tobytes(), self._own_halfwidths[i].tobytes(), demo))
            self._row_keys = keys
        return self._row_keys


def concat_sample_sets(sets: Sequence[SampleSet]) -> SampleSet:
    """Stack several sample sets into one (demographic columns unioned)."""
    if not sets:
        raise ValidationError("cannot concatenate zero sample sets")
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise ValidationError(f"sample sets have mismatched trait dimensions {sorted(dims)}")
    names = sorted({name for s in sets for name in s.demographics})
    demo = {
        name: tuple(v for s in sets for v in s.demographics.get(name, (None,) * len(s)))
        for name in names
    }
    return SampleSet(
        np.vstack([s.traits for s in sets]),
        np.vstack([s.own_halfwidths for s in sets]),
        demo,
    )


@dataclass(frozen=True)
class WidthSpec:
    """Distribution of per-trait own-window halfwidths for synthetic persons."""

    dist: str  # "constant" | "uniform"
    value: float = 0.0
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.dist == "constant":
            if self.value < 0:
                raise ValidationError("constant width must be nonnegative")
        elif self.dist == "uniform":
            if not 0 <= self.low <= self.high:
                raise ValidationError("uniform width requires 0 <= low <= high")
        else:
            raise ValidationError(f"unknown width distribution {self.dist!r}")

    @property
    def is_random(self) -> bool:
        return self.dist == "uniform" and self.high > self.low

    def draw(self, rng: np.random.Generator | None, n: int, dim: int) -> np.ndarray:
        if self.dist == "constant":
            return np.full((n, dim), self.value)
        if not self.is_random:
            return np.full((n, dim), self.low)
        return rng.uniform(self.low, self.high, size=(n, dim))


@dataclass(frozen=True)
class ParametricSpec:
    """Gaussian population: N draws from N(mean, cov) clipped to [0, 1] per dim."""

    count: int
    mean: tuple[float, ...]
    cov: np.ndarray
    widths: WidthSpec
    demographics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError("parametric population count must be >= 1")
        mean = tuple(float(m) for m in self.mean)
        if any(not 0.0 <= m <= 1.0 for m in mean):
            raise ValidationError("parametric mean must lie in [0, 1] per dimension")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", validated_covariance(self.cov, len(mean)))

    @property
    def dim(self) -> int:
        return len(self.mean)


@dataclass(frozen=True)
class CsvSpec:
    """Sample file reference: traits and demographics from a CSV on disk."""

    path: str
    widths: WidthSpec


@dataclass(frozen=True)
class FilterSpec:
    """One demographic filter: equality on ``value`` or a [min, max] range."""

    name: str
    value: object = None
    minimum: float | None = None
    maximum: float | None = None
    importance: float = 1.0

    def __post_init__(self):
        if self.value is None and self.minimum is None and self.maximum is None:
            raise ValidationError(f"filter {self.name!r} needs a value or a min/max range")
        if self.value is not None and (self.minimum is not None or self.maximum is not None):
            raise ValidationError(f"filter {self.name!r} cannot mix value and range")

    def matches(self, attribute) -> bool:
        if attribute is None:
            return False
        if self.value is not None:
            return attribute == self.value
        try:
            x = float(attribute)
        except (TypeError, ValueError):
            return False
        if self.minimum is not None and x < self.minimum:
            return False
        if self.maximum is not None and x > self.maximum:
            return False
        return True


@dataclass(frozen=True)
class GroupModel:
    """A population the user interacts with, plus its interaction parameters."""

    id: str
    population: ParametricSpec | CsvSpec | SampleSet
    base_encounter_rate: float  # encounters per month before personality scaling
    established: bool = True
    ramp_tau: float = 6.0  # months; ramp-in scale for new groups
    mean_drift: tuple[float, ...] | None = None  # per-trait drift per year
    demographic_filters: dict[str, FilterSpec] = field(default_factory=dict)

    def __post_init__(self):
        if self.base_encounter_rate < 0:
            raise ValidationError(f"group {self.id!r}: base_encounter_rate must be >= 0")
        if self.ramp_tau <= 0:
            raise ValidationError(f"group {self.id!r}: ramp_tau must be > 0")
        if self.mean_drift is not None:
            object.__setattr__(self, "mean_drift", tuple(float(x) for x in self.mean_drift))


class RelaxationStep(NamedTuple):
    step: int
    action: str
    count: int


@dataclass(frozen=True)
class SubgroupSelection:
    """An intersected, filtered population slice plus its relaxation history.

    ``pool`` keeps the pre-filter intersection so dropped filters can
    re-admit members; ``window`` is the effective (possibly widened) user
    window to use downstream, set by :func:`ensure_significance`.
    """

    source_ids: tuple[str, ...]
    filters: dict[str, FilterSpec]
    pool: SampleSet
    members: SampleSet
    relaxation_log: tuple[RelaxationStep, ...] = ()
    window: CompatibilityWindow | None = None

    @property
    def primary_id(self) -> str:
        return "+".join(self.source_ids) if self.source_ids else "subgroup"


def load_sample_csv(path: str, widths: WidthSpec, seed: int | None = None) -> SampleSet:
    """Load persons from a CSV with header ``trait_1..trait_D,<demo names>``.

    Own-window halfwidths are drawn from ``widths`` (seed required when the
    distribution is random). Malformed rows raise :class:`IngestionError`
    naming the file row (1-based, header included) and field.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ValidationError(f"cannot read population sample file {path!r}: {exc}") from exc
    if not rows:
        raise ValidationError(f"population sample file {path!r} is empty")
    header = [name.strip() for name in rows[0]]
    trait_names = []
    for name in header:
        if name == f"trait_{len(trait_names) + 1}":
            trait_names.append(name)
        else:
            break
    dim = len(trait_names)
    if dim == 0:
        raise IngestionError(path, 1, header[0] if header else "", "header must start with trait_1")
    demo_names = header[dim:]

    traits = np.empty((len(rows) - 1, dim))
    demo_columns: dict[str, list] = {name: [] for name in demo_names}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise IngestionError(
                path, r, "<row>", f"expected {len(header)} columns, got {len(row)}"
            )
        for j in range(dim):
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise IngestionError(path, r, trait_names[j], f"not a number: {cell!r}") from None
            if not 0.0 <= value <= 1.0:
                raise IngestionError(path, r, trait_names[j], f"trait {value} outside [0, 1]")
            traits[r - 2, j] = value
        for j, name in enumerate(demo_names):
            cell = row[dim + j].strip()
            try:
                demo_columns[name].append(float(cell))
            except ValueError:
                demo_columns[name].append(cell)

    if widths.is_random and seed is None:
        raise ValidationError("a seed is required to draw own-window widths")
    rng = child_rng(seed, 0) if widths.is_random else None
    halfwidths = widths.draw(rng, traits.shape[0], dim)
    return SampleSet(traits, halfwidths, {k: tuple(v) for k, v in demo_columns.items()})


def load_population(
    group: GroupModel, seed: int | None = None, count_override: int | None = None
) -> SampleSet:
    """Materialize a group's population as a SampleSet.

    Parametric mode draws traits from the group's clipped Gaussian and
    per-person own-window halfwidths from the width distribution;
    bit-deterministic for a fixed (spec, seed).
    """
    spec = group.population
    if isinstance(spec, SampleSet):
        samples = spec
        if count_override is not None:
            if count_override > len(samples):
                raise ValidationError(
                    f"count_override {count_override} exceeds sample size {len(samples)}"
                )
            samples = samples.subset(range(count_override))
        return SampleSet(samples.traits, samples.own_halfwidths, samples.demographics, group.id)

    if isinstance(spec, CsvSpec):
        samples = load_sample_csv(spec.path, spec.widths, seed)
        if count_override is not None:
            if count_override > len(samples):
                raise ValidationError(
                    f"count_override {count_override} exceeds sample size {len(samples)}"
                )
            samples = samples.subset(range(count_override))
        return SampleSet(samples.traits, samples.own_halfwidths, samples.demographics, group.id)

    if not isinstance(spec, ParametricSpec):
        raise ValidationError(f"unsupported population spec {type(spec).__name__}")
    if seed is None:
        raise ValidationError("a seed is required for parametric populations")
    count = count_override if count_override is not None else spec.count
    if count < 1:
        raise ValidationError("population count must be >= 1")
    rng = child_rng(seed, 0)
    traits = gaussian_draws(rng, np.asarray(spec.mean), spec.cov, count)
    halfwidths = spec.widths.draw(rng, count, spec.dim)
    demo = {name: (value,) * count for name, value in spec.demographics.items()}
    return SampleSet(traits, halfwidths, demo, group.id)


def _apply_filters(pool: SampleSet, filters: dict[str, FilterSpec]) -> SampleSet:
    if not filters:
        return pool
    mask = np.ones(len(pool), dtype=bool)
    for spec in filters.values():
        column = pool.demographics.get(spec.name)
        if column is None:
            mask[:] = False
            break
        mask &= np.fromiter((spec.matches(v) for v in column), dtype=bool, count=len(pool))
    return pool.subset(np.flatnonzero(mask))


def intersect_subgroups(
    groups: Sequence[SampleSet], filters: dict[str, FilterSpec] | None = None
) -> SubgroupSelection:
    """Members present in every input set and satisfying all demographic filters.

    Person identity is by value (traits, own window, demographics); the
    result carries no duplicates and preserves first-set order.
    """
    if not groups:
        raise ValidationError("at least one sample set is required")
    dims = {s.dim for s in groups}
    if len(dims) != 1:
        raise ValidationError(f"sample sets have mismatched trait dimensions {sorted(dims)}")
    filters = dict(filters or {})

    first = groups[0]
    keep: list[int] = []
    seen = set()
    other_keys = [set(s.row_keys()) for s in groups[1:]]
    for i, key in enumerate(first.row_keys()):
        if key in seen:
            continue
        if all(key in other for other in other_keys):
            seen.add(key)
            keep.append(i)
    pool = first.subset(keep)
    members = _apply_filters(pool, filters)
    source_ids = tuple(s.group_id for s in groups if s.group_id is not None) or ("subgroup",)
    return SubgroupSelection(source_ids=source_ids, filters=filters, pool=pool, members=members)


def ensure_significance(
    selection: SubgroupSelection,
    window: CompatibilityWindow,
    min_samples: int = DEFAULT_MIN_SAMPLES,
    widen_factor: float = DEFAULT_WIDEN_FACTOR,
    max_widenings: int = DEFAULT_MAX_WIDENINGS,
) -> SubgroupSelection:
    """Relax the subgroup until at least ``min_samples`` members fall in-window.

    Relaxation is self-similar: all window halfwidths are scaled uniformly by
    ``widen_factor``, up to ``max_widenings`` times; after that demographic
    filters are dropped in ascending importance order (ties: last declared
    drops first). Every step is logged. Raises InsufficientDataError, log
    attached, when all relaxations are exhausted.
    """
    if min_samples < 1:
        raise ValidationError("min_samples must be >= 1")
    if widen_factor <= 1.0:
        raise ValidationError("widen_factor must be > 1")

    def in_window_count(members: SampleSet, win: CompatibilityWindow) -> int:
        if len(members) == 0:
            return 0
        return int(np.count_nonzero(in_window_mask(members.traits, win)))

    members = selection.members
    filters = dict(selection.filters)
    effective = window
    count = in_window_count(members, effective)
    if count >= min_samples:
        return replace(selection, window=effective)

    log: list[RelaxationStep] = list(selection.relaxation_log)
    step = len(log)
    widenings = 0
    scale = 1.0
    drop_order = sorted(
        enumerate(filters.values()), key=lambda item: (item[1].importance, -item[0])
    )
    droppable = [spec.name for _, spec in drop_order]

    while count < min_samples:
        step += 1
        if widenings < max_widenings:
            widenings += 1
            scale *= widen_factor
            effective = window.scaled(scale)
            count = in_window_count(members, effective)
            log.append(
                RelaxationStep(
                    step, f"widened window halfwidths x{widen_factor:g} (cumulative x{scale:g})", count
                )
            )
        elif droppable:
            name = droppable.pop(0)
            del filters[name]
            members = _apply_filters(selection.pool, filters)
            count = in_window_count(members, effective)
            log.append(RelaxationStep(step, f"dropped demographic filter {name!r}", count))
        else:
            raise InsufficientDataError(
                f"subgroup {selection.primary_id!r} has {count} in-window members "
                f"(need {min_samples}) after all relaxations",
                relaxation_log=log,
                module="population",
            )

    return replace(
        selection, filters=filters, members=members, relaxation_log=tuple(log), window=effective
    )
