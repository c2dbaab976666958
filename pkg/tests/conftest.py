import json
import os

import numpy as np
import pytest

from heartcast.matching import CompatibilityWindow
from heartcast.population import SampleSet, SubgroupSelection

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def load_fixture(name: str) -> dict:
    with open(fixture_path(name), "r", encoding="utf-8") as handle:
        return json.load(handle)


def make_sample_set(traits, own_halfwidth=0.3, demographics=None, group_id=None) -> SampleSet:
    traits = np.asarray(traits, dtype=np.float64)
    if np.isscalar(own_halfwidth):
        own = np.full_like(traits, own_halfwidth)
    else:
        own = np.asarray(own_halfwidth, dtype=np.float64)
    return SampleSet(traits, own, demographics or {}, group_id)


def make_selection(traits, own_halfwidth=0.3, demographics=None, group_id="g") -> SubgroupSelection:
    samples = make_sample_set(traits, own_halfwidth, demographics, group_id)
    return SubgroupSelection(source_ids=(group_id,), filters={}, pool=samples, members=samples)


def make_window(dim=4, center=0.5, halfwidth=0.25, importance=1.0, drift=0.0) -> CompatibilityWindow:
    return CompatibilityWindow(
        centers=(center,) * dim,
        halfwidths=(halfwidth,) * dim,
        importances=(importance,) * dim,
        drift_rate=drift,
    )


@pytest.fixture
def scenario_28() -> dict:
    return load_fixture("with_partner_28.json")


@pytest.fixture
def scenario_51() -> dict:
    return load_fixture("single_51.json")


@pytest.fixture
def scenario_locations() -> tuple[dict, dict]:
    return load_fixture("location_a.json"), load_fixture("location_b.json")
