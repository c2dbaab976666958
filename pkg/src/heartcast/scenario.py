"""Scenario file schema: strict parsing of scenario JSON into domain objects.

Forecasts are contracts, so the schema is strict: unknown keys are rejected
at every level and every error names the offending field path. Relative
population CSV paths resolve against the scenario file's directory.
"""

from __future__ import annotations

import os
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .forecast import (
    McConfig,
    RelationshipSpec,
    Scenario,
    SignificanceConfig,
    UserProfile,
    normalized_amplitudes,
)
from .matching import DEFAULT_BANDS, CompatibilityWindow, QualityBand
from .population import CsvSpec, FilterSpec, GroupModel, ParametricSpec, WidthSpec

SCENARIO_SCHEMA_VERSION = 1

_TOP_REQUIRED = ("schema_version", "seed", "horizon_years", "user", "groups")
_TOP_OPTIONAL = ("grid_step_months", "mc", "relationship", "bands", "scores", "significance")

DEFAULT_OWN_WINDOW_WIDTHS = WidthSpec(dist="constant", value=0.25)


def _fail(path: str, message: str):
    raise ValidationError(message, field_path=path)


def _require_mapping(value: Any, path: str) -> Mapping:
    if not isinstance(value, Mapping):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(obj: Mapping, path: str, required: Sequence[str], optional: Sequence[str]):
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        _fail(path, f"unknown key(s): {', '.join(unknown)}")
    missing = [key for key in required if key not in obj]
    if missing:
        _fail(path, f"missing required key(s): {', '.join(missing)}")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(value):
        _fail(path, "expected a finite number")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    return int(value)


def _boolean(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, f"expected a boolean, got {type(value).__name__}")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        _fail(path, "expected a nonempty string")
    return value


def _number_list(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
        _fail(path, f"expected an array of numbers, got {type(value).__name__}")
    out = tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    if length is not None and len(out) != length:
        _fail(path, f"expected {length} values, got {len(out)}")
    return out


def _unit_list(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    out = _number_list(value, path, length)
    for i, v in enumerate(out):
        if not 0.0 <= v <= 1.0:
            _fail(f"{path}[{i}]", f"value {v} outside [0, 1]")
    return out


def _window(data: Any, path: str, dim: int | None) -> CompatibilityWindow:
    data = _require_mapping(data, path)
    _check_keys(data, path, ("centers", "halfwidths"), ("importances", "drift_rate"))
    centers = _unit_list(data["centers"], f"{path}.centers", dim)
    halfwidths = _number_list(data["halfwidths"], f"{path}.halfwidths", len(centers))
    if "importances" in data:
        importances = _number_list(data["importances"], f"{path}.importances", len(centers))
    else:
        importances = (1.0,) * len(centers)
    drift = _number(data["drift_rate"], f"{path}.drift_rate") if "drift_rate" in data else 0.0
    try:
        return CompatibilityWindow(
            centers=centers, halfwidths=halfwidths, importances=importances, drift_rate=drift
        )
    except ValidationError as exc:
        _fail(path, str(exc))


def _sensitivities(data: Mapping, key: str, path: str, dim: int) -> tuple[float, ...]:
    if key not in data:
        return (1.0,) * dim
    value = data[key]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        scalar = _number(value, f"{path}.{key}")
        if scalar < 0:
            _fail(f"{path}.{key}", "sensitivity must be nonnegative")
        return (scalar,) * dim
    return _number_list(value, f"{path}.{key}", dim)


def _goals(data: Any, path: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(data, Sequence) or isinstance(data, (str, bytes)) or not data:
        _fail(path, "expected a nonempty array of goals")
    goals = []
    for i, item in enumerate(data):
        item = _require_mapping(item, f"{path}[{i}]")
        _check_keys(item, f"{path}[{i}]", ("weight", "sustainability"), ())
        weight = _number(item["weight"], f"{path}[{i}].weight")
        sustainability = _number(item["sustainability"], f"{path}[{i}].sustainability")
        goals.append((weight, sustainability))
    return tuple(goals)


def _user(data: Any, path: str) -> UserProfile:
    data = _require_mapping(data, path)
    _check_keys(
        data,
        path,
        ("traits", "window", "extroversion", "goals", "tau_single"),
        ("amplitudes", "sensitivity", "open_to_dating"),
    )
    traits = _unit_list(data["traits"], f"{path}.traits")
    dim = len(traits)
    window = _window(data["window"], f"{path}.window", dim)
    amplitudes_raw = (
        _number_list(data["amplitudes"], f"{path}.amplitudes", dim)
        if "amplitudes" in data
        else window.importances
    )
    try:
        amplitudes = normalized_amplitudes(amplitudes_raw)
    except ValidationError as exc:
        _fail(f"{path}.amplitudes", str(exc))
    try:
        return UserProfile(
            traits=traits,
            window=window,
            extroversion=_number(data["extroversion"], f"{path}.extroversion"),
            goals=_goals(data["goals"], f"{path}.goals"),
            tau_single=_number(data["tau_single"], f"{path}.tau_single"),
            amplitudes=amplitudes,
            sensitivities=_sensitivities(data, "sensitivity", path, dim),
            open_to_dating=(
                _boolean(data["open_to_dating"], f"{path}.open_to_dating")
                if "open_to_dating" in data
                else True
            ),
        )
    except ValidationError as exc:
        if exc.field_path:
            raise
        _fail(path, str(exc))


def _relationship(data: Any, path: str, dim: int) -> RelationshipSpec:
    data = _require_mapping(data, path)
    _check_keys(
        data,
        path,
        ("partner_traits", "partner_window"),
        ("amplitudes", "sensitivity", "status"),
    )
    traits = _unit_list(data["partner_traits"], f"{path}.partner_traits", dim)
    window = _window(data["partner_window"], f"{path}.partner_window", dim)
    amplitudes_raw = (
        _number_list(data["amplitudes"], f"{path}.amplitudes", dim)
        if "amplitudes" in data
        else window.importances
    )
    try:
        amplitudes = normalized_amplitudes(amplitudes_raw)
    except ValidationError as exc:
        _fail(f"{path}.amplitudes", str(exc))
    status = _string(data["status"], f"{path}.status") if "status" in data else "current"
    try:
        return RelationshipSpec(
            partner_traits=traits,
            partner_window=window,
            partner_amplitudes=amplitudes,
            partner_sensitivities=_sensitivities(data, "sensitivity", path, dim),
            status=status,
        )
    except ValidationError as exc:
        if exc.field_path:
            raise
        _fail(path, str(exc))


def _width_spec(data: Any, path: str) -> WidthSpec:
    data = _require_mapping(data, path)
    _check_keys(data, path, ("dist",), ("value", "low", "high"))
    dist = _string(data["dist"], f"{path}.dist")
    try:
        if dist == "constant":
            _check_keys(data, path, ("dist", "value"), ())
            return WidthSpec(dist="constant", value=_number(data["value"], f"{path}.value"))
        if dist == "uniform":
            _check_keys(data, path, ("dist", "low", "high"), ())
            return WidthSpec(
                dist="uniform",
                low=_number(data["low"], f"{path}.low"),
                high=_number(data["high"], f"{path}.high"),
            )
    except ValidationError as exc:
        if exc.field_path:
            raise
        _fail(path, str(exc))
    _fail(f"{path}.dist", f"unknown width distribution {dist!r}")


def _demographics(data: Any, path: str) -> dict:
    data = _require_mapping(data, path)
    out = {}
    for name, value in data.items():
        if isinstance(value, bool) or isinstance(value, (int, float, str)):
            out[str(name)] = value
        else:
            _fail(f"{path}.{name}", "demographic values must be scalars")
    return out


def _population(data: Any, path: str, base_dir: str | None) -> ParametricSpec | CsvSpec:
    data = _require_mapping(data, path)
    if "type" not in data:
        _fail(path, "missing required key(s): type")
    kind = _string(data["type"], f"{path}.type")
    if kind == "parametric":
        _check_keys(
            data,
            path,
            ("type", "n", "mean", "cov"),
            ("own_window_halfwidths", "demographics"),
        )
        mean = _unit_list(data["mean"], f"{path}.mean")
        dim = len(mean)
        cov_rows = data["cov"]
        if not isinstance(cov_rows, Sequence) or isinstance(cov_rows, (str, bytes)):
            _fail(f"{path}.cov", "expected a matrix (array of arrays)")
        cov = np.asarray(
            [_number_list(row, f"{path}.cov[{i}]", dim) for i, row in enumerate(cov_rows)]
        )
        widths = (
            _width_spec(data["own_window_halfwidths"], f"{path}.own_window_halfwidths")
            if "own_window_halfwidths" in data
            else DEFAULT_OWN_WINDOW_WIDTHS
        )
        demographics = (
            _demographics(data["demographics"], f"{path}.demographics")
            if "demographics" in data
            else {}
        )
        try:
            return ParametricSpec(
                count=_integer(data["n"], f"{path}.n"),
                mean=mean,
                cov=cov,
                widths=widths,
                demographics=demographics,
            )
        except ValidationError as exc:
            if exc.field_path:
                raise
            _fail(path, str(exc))
    if kind == "csv":
        _check_keys(data, path, ("type", "path"), ("own_window_halfwidths",))
        csv_path = _string(data["path"], f"{path}.path")
        if base_dir is not None and not os.path.isabs(csv_path):
            csv_path = os.path.join(base_dir, csv_path)
        widths = (
            _width_spec(data["own_window_halfwidths"], f"{path}.own_window_halfwidths")
            if "own_window_halfwidths" in data
            else DEFAULT_OWN_WINDOW_WIDTHS
        )
        return CsvSpec(path=csv_path, widths=widths)
    _fail(f"{path}.type", f"population type must be 'parametric' or 'csv', got {kind!r}")


def _filters(data: Any, path: str) -> dict[str, FilterSpec]:
    data = _require_mapping(data, path)
    out: dict[str, FilterSpec] = {}
    for name, raw in data.items():
        fpath = f"{path}.{name}"
        try:
            if isinstance(raw, Mapping):
                _check_keys(raw, fpath, (), ("value", "min", "max", "importance"))
                out[name] = FilterSpec(
                    name=name,
                    value=raw.get("value"),
                    minimum=_number(raw["min"], f"{fpath}.min") if "min" in raw else None,
                    maximum=_number(raw["max"], f"{fpath}.max") if "max" in raw else None,
                    importance=(
                        _number(raw["importance"], f"{fpath}.importance")
                        if "importance" in raw
                        else 1.0
                    ),
                )
            else:
                out[name] = FilterSpec(name=name, value=raw)
        except ValidationError as exc:
            if exc.field_path:
                raise
            _fail(fpath, str(exc))
    return out


def _group(data: Any, path: str, dim: int, base_dir: str | None) -> GroupModel:
    data = _require_mapping(data, path)
    _check_keys(
        data,
        path,
        ("id", "base_encounter_rate", "population"),
        ("established", "ramp_tau_months", "mean_drift", "demographic_filters"),
    )
    population = _population(data["population"], f"{path}.population", base_dir)
    if isinstance(population, ParametricSpec) and population.dim != dim:
        _fail(f"{path}.population.mean", f"expected {dim} trait dimensions, got {population.dim}")
    mean_drift = (
        _number_list(data["mean_drift"], f"{path}.mean_drift", dim)
        if "mean_drift" in data
        else None
    )
    try:
        return GroupModel(
            id=_string(data["id"], f"{path}.id"),
            population=population,
            base_encounter_rate=_number(data["base_encounter_rate"], f"{path}.base_encounter_rate"),
            established=(
                _boolean(data["established"], f"{path}.established")
                if "established" in data
                else True
            ),
            ramp_tau=(
                _number(data["ramp_tau_months"], f"{path}.ramp_tau_months")
                if "ramp_tau_months" in data
                else 6.0
            ),
            mean_drift=mean_drift,
            demographic_filters=(
                _filters(data["demographic_filters"], f"{path}.demographic_filters")
                if "demographic_filters" in data
                else {}
            ),
        )
    except ValidationError as exc:
        if exc.field_path:
            raise
        _fail(path, str(exc))


def _bands(data: Any, path: str) -> tuple[QualityBand, ...]:
    if not isinstance(data, Sequence) or isinstance(data, (str, bytes)) or not data:
        _fail(path, "expected a nonempty array of bands")
    bands = []
    for i, item in enumerate(data):
        item = _require_mapping(item, f"{path}[{i}]")
        _check_keys(item, f"{path}[{i}]", ("name", "lower", "upper"), ("ideal",))
        try:
            bands.append(
                QualityBand(
                    name=_string(item["name"], f"{path}[{i}].name"),
                    lower=_number(item["lower"], f"{path}[{i}].lower"),
                    upper=_number(item["upper"], f"{path}[{i}].upper"),
                    ideal=(
                        _boolean(item["ideal"], f"{path}[{i}].ideal") if "ideal" in item else False
                    ),
                )
            )
        except ValidationError as exc:
            if exc.field_path:
                raise
            _fail(f"{path}[{i}]", str(exc))
    return tuple(bands)


def parse_scenario(data: Any, base_dir: str | None = None) -> Scenario:
    """Validate a decoded scenario JSON object and build the Scenario.

    ``base_dir`` anchors relative population CSV paths (usually the scenario
    file's directory). Raises :class:`ValidationError` with a field path on
    the first violation.
    """
    data = _require_mapping(data, "scenario")
    _check_keys(data, "scenario", _TOP_REQUIRED, _TOP_OPTIONAL)
    version = _integer(data["schema_version"], "schema_version")
    if version != SCENARIO_SCHEMA_VERSION:
        _fail("schema_version", f"unsupported schema version {version} (expected {SCENARIO_SCHEMA_VERSION})")

    user = _user(data["user"], "user")
    dim = len(user.traits)

    relationship = None
    if data.get("relationship") is not None:
        relationship = _relationship(data["relationship"], "relationship", dim)

    groups_raw = data["groups"]
    if not isinstance(groups_raw, Sequence) or isinstance(groups_raw, (str, bytes)) or not groups_raw:
        _fail("groups", "expected a nonempty array of groups")
    groups = tuple(
        _group(item, f"groups[{i}]", dim, base_dir) for i, item in enumerate(groups_raw)
    )

    mc = McConfig()
    if "mc" in data:
        mc_raw = _require_mapping(data["mc"], "mc")
        _check_keys(mc_raw, "mc", (), ("suitors", "realizations"))
        try:
            mc = McConfig(
                suitors=_integer(mc_raw["suitors"], "mc.suitors") if "suitors" in mc_raw else 2000,
                realizations=(
                    _integer(mc_raw["realizations"], "mc.realizations")
                    if "realizations" in mc_raw
                    else 1000
                ),
            )
        except ValidationError as exc:
            if exc.field_path:
                raise
            _fail("mc", str(exc))

    bands = DEFAULT_BANDS
    if "bands" in data:
        bands = _bands(data["bands"], "bands")

    significance = SignificanceConfig()
    if "significance" in data:
        sig_raw = _require_mapping(data["significance"], "significance")
        _check_keys(sig_raw, "significance", (), ("min_samples", "widen_factor", "max_widenings"))
        significance = SignificanceConfig(
            min_samples=(
                _integer(sig_raw["min_samples"], "significance.min_samples")
                if "min_samples" in sig_raw
                else SignificanceConfig.min_samples
            ),
            widen_factor=(
                _number(sig_raw["widen_factor"], "significance.widen_factor")
                if "widen_factor" in sig_raw
                else SignificanceConfig.widen_factor
            ),
            max_widenings=(
                _integer(sig_raw["max_widenings"], "significance.max_widenings")
                if "max_widenings" in sig_raw
                else SignificanceConfig.max_widenings
            ),
        )

    reference_volume = 1000.0
    if "scores" in data:
        scores_raw = _require_mapping(data["scores"], "scores")
        _check_keys(scores_raw, "scores", (), ("social_reference_volume",))
        if "social_reference_volume" in scores_raw:
            reference_volume = _number(
                scores_raw["social_reference_volume"], "scores.social_reference_volume"
            )

    try:
        return Scenario(
            seed=_integer(data["seed"], "seed"),
            horizon_years=_number(data["horizon_years"], "horizon_years"),
            grid_step_months=(
                _number(data["grid_step_months"], "grid_step_months")
                if "grid_step_months" in data
                else 1.0
            ),
            mc=mc,
            user=user,
            relationship=relationship,
            groups=groups,
            bands=bands,
            significance=significance,
            social_reference_volume=reference_volume,
        )
    except ValidationError as exc:
        if exc.field_path:
            raise
        _fail("scenario", str(exc))
