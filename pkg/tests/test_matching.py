"""Windows, quality scores, and single-encounter probabilities."""

import numpy as np
import pytest

from heartcast.errors import InsufficientDataError, ValidationError
from heartcast.matching import (
    DEFAULT_BANDS,
    CompatibilityWindow,
    QualityBand,
    derive_windows,
    encounter_probabilities,
    quality_score,
    quality_scores,
    validate_bands,
)

from conftest import make_selection, make_window


class TestDeriveWindows:
    def test_zero_drift_is_identity(self):
        window = make_window(drift=0.0)
        for t in (0.0, 1.0, 25.0):
            assert derive_windows(window, t) == window

    def test_positive_drift_scales_halfwidths(self):
        window = make_window(halfwidth=0.1, drift=0.1)
        derived = derive_windows(window, 5.0)
        assert derived.halfwidths == (pytest.approx(0.15),) * 4
        assert derived.centers == window.centers
        assert derived.importances == window.importances

    def test_negative_drift_floors_at_zero(self):
        window = make_window(halfwidth=0.1, drift=-0.3)
        derived = derive_windows(window, 10.0)
        assert derived.halfwidths == (0.0,) * 4

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            derive_windows(make_window(), -1.0)


class TestQualityScore:
    def test_center_scores_one(self):
        window = make_window()
        assert quality_score((0.5, 0.5, 0.5, 0.5), window) == pytest.approx(1.0)

    def test_edge_scores_zero(self):
        window = make_window(halfwidth=0.25)
        assert quality_score((0.75, 0.25, 0.75, 0.25), window) == pytest.approx(0.0)

    def test_half_distance_scores_half(self):
        window = make_window(halfwidth=0.2)
        traits = (0.6, 0.4, 0.6, 0.4)  # d_i = 0.5 in every dimension
        assert quality_score(traits, window) == pytest.approx(0.5)

    def test_out_of_window_marker(self):
        window = make_window(halfwidth=0.1)
        assert quality_score((0.9, 0.5, 0.5, 0.5), window) is None

    def test_zero_halfwidth_only_accepts_center(self):
        window = CompatibilityWindow(
            centers=(0.5, 0.5), halfwidths=(0.0, 0.2), importances=(1.0, 1.0)
        )
        assert quality_score((0.5, 0.5), window) == pytest.approx(1.0)
        assert quality_score((0.500001, 0.5), window) is None

    def test_invariant_under_importance_rescaling(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            centers = rng.random(4)
            halfwidths = rng.uniform(0.1, 0.4, 4)
            importances = rng.uniform(0.1, 3.0, 4)
            window = CompatibilityWindow(tuple(centers), tuple(halfwidths), tuple(importances))
            scaled = CompatibilityWindow(
                tuple(centers), tuple(halfwidths), tuple(importances * 7.3)
            )
            traits = tuple(np.clip(centers + rng.uniform(-1, 1, 4) * halfwidths, 0, 1))
            a, b = quality_score(traits, window), quality_score(traits, scaled)
            if a is None:
                assert b is None
            else:
                assert a == pytest.approx(b, abs=1e-12)

    def test_accepts_person_objects(self):
        selection = make_selection(np.full((1, 4), 0.5))
        person = selection.members[0]
        assert quality_score(person, make_window()) == pytest.approx(1.0)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            quality_score((0.5, 0.5), make_window(dim=4))


class TestQualityBands:
    def test_default_bands_partition(self):
        assert validate_bands(DEFAULT_BANDS) == DEFAULT_BANDS

    def test_gap_rejected(self):
        with pytest.raises(ValidationError):
            validate_bands(
                (QualityBand("low", 0.0, 0.4), QualityBand("high", 0.5, 1.0))
            )

    def test_not_reaching_one_rejected(self):
        with pytest.raises(ValidationError):
            validate_bands((QualityBand("low", 0.0, 0.9),))

    def test_invalid_interval_rejected(self):
        with pytest.raises(ValidationError):
            QualityBand("bad", 0.5, 0.5)


class TestEncounterProbabilities:
    def test_universal_acceptance_gives_one(self):
        rng = np.random.default_rng(3)
        selection = make_selection(rng.random((500, 4)), own_halfwidth=1.0)
        window = make_window(halfwidth=1.0)
        curve = encounter_probabilities(
            selection, (0.5,) * 4, window, DEFAULT_BANDS, [0.0, 6.0, 12.0]
        )
        assert np.allclose(curve.total, 1.0)

    def test_zero_halfwidth_gives_zero(self):
        rng = np.random.default_rng(4)
        selection = make_selection(rng.random((500, 4)), own_halfwidth=1.0)
        window = make_window(halfwidth=0.0)
        curve = encounter_probabilities(selection, (0.5,) * 4, window, DEFAULT_BANDS, [0.0, 12.0])
        assert np.all(curve.total == 0.0)

    def test_uniform_population_quarter_halfwidth(self):
        # Derived oracle: 1e6 uniform draws in [0,1]^4 against a halfwidth-0.25
        # window fully inside the cube accept with probability 0.5^4 = 0.0625.
        rng = np.random.default_rng(7)
        n = 1_000_000
        selection = make_selection(rng.random((n, 4)), own_halfwidth=1.0)
        window = make_window(halfwidth=0.25)
        curve = encounter_probabilities(selection, (0.5,) * 4, window, DEFAULT_BANDS, [0.0])
        sigma = np.sqrt(0.0625 * (1 - 0.0625) / n)
        assert abs(curve.total[0] - 0.0625) < 3 * sigma

    def test_mutual_fit_required(self):
        # Members inside the user's window but rejecting the user count zero.
        traits = np.full((100, 4), 0.55)
        selection = make_selection(traits, own_halfwidth=0.01)  # windows exclude user at 0.4
        window = make_window(halfwidth=0.3, center=0.5)
        curve = encounter_probabilities(selection, (0.4,) * 4, window, DEFAULT_BANDS, [0.0])
        assert curve.total[0] == 0.0
        accepting = make_selection(traits, own_halfwidth=0.2)
        curve2 = encounter_probabilities(accepting, (0.4,) * 4, window, DEFAULT_BANDS, [0.0])
        assert curve2.total[0] == 1.0

    def test_band_additivity_exact(self):
        rng = np.random.default_rng(8)
        selection = make_selection(rng.random((2000, 4)), own_halfwidth=0.5)
        window = make_window(halfwidth=0.35)
        curve = encounter_probabilities(
            selection, (0.5,) * 4, window, DEFAULT_BANDS, np.arange(0.0, 24.0, 1.0)
        )
        summed = sum(curve.by_band.values())
        assert np.max(np.abs(summed - curve.total)) <= 1e-12

    def test_monotone_in_halfwidth(self):
        rng = np.random.default_rng(9)
        selection = make_selection(rng.random((3000, 4)), own_halfwidth=0.6)
        grid = [0.0, 12.0]
        totals = []
        for hw in (0.1, 0.2, 0.3, 0.5):
            curve = encounter_probabilities(
                selection, (0.5,) * 4, make_window(halfwidth=hw), DEFAULT_BANDS, grid
            )
            totals.append(curve.total)
        for small, big in zip(totals, totals[1:]):
            assert np.all(big >= small - 1e-15)

    def test_drift_shifts_members_over_time(self):
        # Members start outside a tight window and drift into it.
        traits = np.full((200, 4), 0.30)
        selection = make_selection(traits, own_halfwidth=1.0)
        window = make_window(halfwidth=0.05, center=0.5)
        drift = (0.02,) * 4  # per year; reaches 0.5 after 10 years
        grid = [0.0, 60.0, 120.0]
        curve = encounter_probabilities(selection, (0.5,) * 4, window, DEFAULT_BANDS, grid, drift)
        assert curve.total[0] == 0.0
        assert curve.total[2] == 1.0

    def test_window_drift_expands_acceptance(self):
        traits = np.full((100, 4), 0.70)
        selection = make_selection(traits, own_halfwidth=1.0)
        window = make_window(halfwidth=0.1, center=0.5, drift=0.5)
        curve = encounter_probabilities(
            selection, (0.5,) * 4, window, DEFAULT_BANDS, [0.0, 12.0, 36.0]
        )
        assert curve.total[0] == 0.0  # |0.7-0.5| > 0.1
        assert curve.total[2] == 1.0  # halfwidth 0.1*(1+0.5*3) = 0.25 >= 0.2

    def test_quality_zero_members_still_counted(self):
        # A member exactly on the window edge scores 0 and lands in the bottom band.
        traits = np.full((10, 4), 0.75)
        selection = make_selection(traits, own_halfwidth=1.0)
        window = make_window(halfwidth=0.25)
        curve = encounter_probabilities(selection, (0.5,) * 4, window, DEFAULT_BANDS, [0.0])
        assert curve.total[0] == 1.0
        assert curve.by_band["marginal"][0] == 1.0

    def test_empty_selection_raises(self):
        selection = make_selection(np.empty((0, 4)))
        with pytest.raises(InsufficientDataError):
            encounter_probabilities(
                selection, (0.5,) * 4, make_window(), DEFAULT_BANDS, [0.0]
            )


class TestQualityScoresVectorized:
    def test_matches_scalar_path(self):
        rng = np.random.default_rng(10)
        window = CompatibilityWindow(
            centers=tuple(rng.random(4)),
            halfwidths=tuple(rng.uniform(0.05, 0.4, 4)),
            importances=tuple(rng.uniform(0.5, 2.0, 4)),
        )
        traits = rng.random((50, 4))
        vector = quality_scores(traits, window)
        for i in range(50):
            scalar = quality_score(tuple(traits[i]), window)
            if scalar is None:
                assert np.isnan(vector[i])
            else:
                assert vector[i] == pytest.approx(scalar, abs=1e-15)
