"""Utility functionals, PCA suitor sampling, penalties, open-option valuation."""

import numpy as np
import pytest

from heartcast.errors import InsufficientDataError, ValidationError
from heartcast.sociology import CumulativeForecast
from heartcast.utility import (
    PersonParams,
    RelationshipParams,
    SingleLifeParams,
    SuitorSample,
    mirrored_template,
    open_option_utility,
    penalty_profile,
    relationship_utility,
    sample_suitors,
    single_utility,
)

from conftest import make_selection, make_window


def person(amplitudes, sensitivities, ideals, traits):
    return PersonParams(
        amplitudes=tuple(amplitudes),
        sensitivities=tuple(sensitivities),
        ideals=tuple(ideals),
        traits=tuple(traits),
    )


def random_params(rng, dim=4):
    return RelationshipParams(
        person(rng.uniform(0.1, 2, dim), rng.uniform(0, 3, dim), rng.random(dim), rng.random(dim)),
        person(rng.uniform(0.1, 2, dim), rng.uniform(0, 3, dim), rng.random(dim), rng.random(dim)),
    )


def forecast_from_total(total, grid=None) -> CumulativeForecast:
    total = np.asarray(total, dtype=np.float64)
    grid = np.arange(total.size, dtype=np.float64) if grid is None else np.asarray(grid)
    with np.errstate(divide="ignore"):
        hazard = np.where(total < 1.0, -np.log1p(-np.minimum(total, 1.0)), 50.0)
    return CumulativeForecast(
        grid_months=grid,
        total=total,
        by_group={"g": total.copy()},
        by_quality={"ideal": total.copy()},
        hazard_by_group={"g": hazard},
        hazard_by_quality={"ideal": hazard},
    )


class TestRelationshipUtility:
    def test_t0_is_product_of_amplitude_sums(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            params = random_params(rng)
            expected = sum(params.person1.amplitudes) * sum(params.person2.amplitudes)
            assert relationship_utility(params, 0.0) == pytest.approx(expected, rel=1e-15)

    def test_perfect_match_is_constant(self):
        ideals = (0.3, 0.6, 0.2, 0.8)
        params = RelationshipParams(
            person((1, 2, 1, 1), (1, 1, 1, 1), ideals, ideals),
            person((1, 1, 3, 1), (2, 2, 2, 2), ideals, ideals),
        )
        values = [relationship_utility(params, t) for t in (0.0, 1.0, 7.5, 40.0)]
        assert all(v == pytest.approx(values[0], rel=1e-15) for v in values)

    def test_scalar_reference_value(self):
        # D=1, a=1, w=1, mismatch 0.5 on both sides: U(1) = e^-1.
        params = RelationshipParams(
            person((1.0,), (1.0,), (0.75,), (0.25,)),
            person((1.0,), (1.0,), (0.75,), (0.25,)),
        )
        assert relationship_utility(params, 1.0) == pytest.approx(0.36787944117144233, abs=1e-15)

    def test_nonincreasing_on_random_draws(self):
        rng = np.random.default_rng(1)
        t = np.linspace(0.0, 30.0, 61)
        for _ in range(1000):
            curve = relationship_utility(random_params(rng), t)
            assert np.all(np.diff(curve) <= 1e-12)

    def test_person_swap_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            params = random_params(rng)
            swapped = RelationshipParams(params.person2, params.person1)
            for t in (0.0, 1.0, 5.0):
                assert relationship_utility(params, t) == relationship_utility(swapped, t)

    def test_amplitude_scaling_is_linear(self):
        rng = np.random.default_rng(3)
        params = random_params(rng)
        scaled = RelationshipParams(
            person(
                tuple(a * 3.0 for a in params.person1.amplitudes),
                params.person1.sensitivities,
                params.person1.ideals,
                params.person1.traits,
            ),
            params.person2,
        )
        for t in (0.0, 2.0, 11.0):
            assert relationship_utility(scaled, t) == pytest.approx(
                3.0 * relationship_utility(params, t), rel=1e-12
            )

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(4)
        params = random_params(rng)
        t = np.array([0.0, 0.5, 2.0, 9.0])
        vector = relationship_utility(params, t)
        for i, ti in enumerate(t):
            assert vector[i] == pytest.approx(relationship_utility(params, float(ti)), rel=1e-14)


class TestSingleUtility:
    def test_t0_is_goal_weight_sum(self):
        params = SingleLifeParams(goals=((2.0, 0.1), (0.5, 0.9)), tau_single=3.0)
        assert single_utility(params, 0.0) == pytest.approx(2.5, abs=1e-15)

    def test_fully_sustainable_goals_constant(self):
        params = SingleLifeParams(goals=((1.0, 1.0), (2.0, 1.0)), tau_single=2.0)
        for t in (0.0, 1.0, 50.0):
            assert single_utility(params, t) == pytest.approx(3.0, abs=1e-15)

    def test_reference_value(self):
        params = SingleLifeParams(goals=((2.0, 0.5), (1.0, 0.0)), tau_single=3.0)
        assert single_utility(params, 3.0) == pytest.approx(1.7357588823428847, abs=1e-15)

    def test_nonincreasing_and_bounded(self):
        rng = np.random.default_rng(5)
        t = np.linspace(0.0, 60.0, 121)
        for _ in range(200):
            goals = tuple((rng.uniform(0.1, 3), rng.random()) for _ in range(3))
            params = SingleLifeParams(goals=goals, tau_single=rng.uniform(0.5, 10))
            curve = single_utility(params, t)
            assert np.all(np.diff(curve) <= 1e-12)
            floor = sum(g * s for g, s in goals)
            ceiling = sum(g for g, _ in goals)
            assert np.all(curve >= floor - 1e-12) and np.all(curve <= ceiling + 1e-12)


FIVE_D_MEAN = np.array([0.4, 0.5, 0.6, 0.45, 0.55])
FIVE_D_COV = np.diag([0.05, 0.06, 0.04, 0.05, 0.06]) ** 2 + 0.0005


class TestSampleSuitors:
    def gaussian_members(self, n=4000, seed=99):
        rng = np.random.default_rng(seed)
        vals, vecs = np.linalg.eigh(FIVE_D_COV)
        draws = FIVE_D_MEAN + (rng.standard_normal((n, 5)) * np.sqrt(vals)) @ vecs.T
        return make_selection(np.clip(draws, 0, 1))

    def test_zero_covariance_collapses_to_mean(self):
        selection = make_selection(np.tile([0.3, 0.4, 0.5, 0.6], (60, 1)))
        sample = sample_suitors(selection, 25, seed=42)
        assert np.allclose(sample.suitors, [0.3, 0.4, 0.5, 0.6])

    def test_clipping_contract(self):
        selection = self.gaussian_members()
        sample = sample_suitors(selection, 5000, seed=1)
        assert sample.suitors.shape == (5000, 5)
        assert sample.suitors.min() >= 0.0 and sample.suitors.max() <= 1.0

    def test_moment_recovery(self):
        # Oracle: moments of the drawn suitors must match the member moments
        # the sampler was built from.
        selection = self.gaussian_members()
        member_mean = selection.members.traits.mean(axis=0)
        member_cov = np.cov(selection.members.traits, rowvar=False)
        sample = sample_suitors(selection, 100_000, seed=42)
        assert np.max(np.abs(sample.suitors.mean(axis=0) - member_mean)) < 0.01
        drawn_cov = np.cov(sample.suitors, rowvar=False)
        assert np.linalg.norm(drawn_cov - member_cov) <= 0.05 * np.linalg.norm(member_cov)

    def test_deterministic_per_seed(self):
        selection = self.gaussian_members(n=500)
        a = sample_suitors(selection, 100, seed=7)
        b = sample_suitors(selection, 100, seed=7)
        c = sample_suitors(selection, 100, seed=8)
        assert np.array_equal(a.suitors, b.suitors)
        assert not np.array_equal(a.suitors, c.suitors)

    def test_too_few_members(self):
        selection = make_selection(np.full((4, 5), 0.5))  # need D+1 = 6
        with pytest.raises(InsufficientDataError):
            sample_suitors(selection, 10, seed=1)


class TestPenaltyProfile:
    def suitor_sample(self, traits):
        return SuitorSample(suitors=np.asarray(traits, dtype=np.float64), source_ids=("g",), seed=0)

    def test_partner_at_centers_zero_penalty(self):
        window = make_window()
        sample = self.suitor_sample(np.random.default_rng(0).random((20, 4)))
        summary = penalty_profile(sample, window, (1.0,) * 4, partner_traits=(0.5,) * 4)
        assert summary.partner == pytest.approx(0.0, abs=1e-15)

    def test_identical_suitors_zero_std(self):
        window = make_window()
        sample = self.suitor_sample(np.tile([0.2, 0.4, 0.6, 0.8], (30, 1)))
        summary = penalty_profile(sample, window, (1.0,) * 4)
        assert summary.std == pytest.approx(0.0, abs=1e-15)

    def test_uniform_gap_average(self):
        window = make_window(center=0.5)
        sample = self.suitor_sample([[0.7, 0.7, 0.7, 0.7]])  # |gap| = 0.2 everywhere
        summary = penalty_profile(sample, window, (1.0,) * 4)
        assert summary.mean == pytest.approx(0.2, abs=1e-15)

    def test_importance_weighted(self):
        window = make_window(center=0.5)
        sample = self.suitor_sample([[0.6, 0.5, 0.5, 0.5]])  # gap 0.1 on first trait
        summary = penalty_profile(sample, window, (2.0, 1.0, 1.0, 1.0))
        assert summary.mean == pytest.approx(2.0 * 0.1 / 4.0, abs=1e-15)


class TestOpenOptionUtility:
    SINGLE = SingleLifeParams(goals=((1.0, 0.0),), tau_single=1.0)

    def template(self, user=(0.5, 0.5, 0.5, 0.5), ideal=(0.3, 0.3, 0.3, 0.3)):
        return mirrored_template(user, ideal, (0.25,) * 4, (1.0,) * 4)

    def test_no_match_equals_single_curve(self):
        forecast = forecast_from_total(np.zeros(13))
        suitors = SuitorSample(np.full((5, 4), 0.5), ("g",), seed=0)
        curve = open_option_utility(forecast, suitors, self.template(), self.SINGLE, 500, seed=3)
        expected = single_utility(self.SINGLE, forecast.grid_months / 12.0)
        assert np.allclose(curve.mean, expected, atol=1e-15)
        assert np.allclose(curve.p10, expected, atol=1e-15)
        assert np.allclose(curve.p90, expected, atol=1e-15)

    def test_certain_early_match_with_perfect_suitors(self):
        # C jumps to 1 at the first step; every suitor is a perfect partner, so
        # the curve equals the (constant 1) relationship utility beyond t_1.
        total = np.array([0.0, 1.0, 1.0, 1.0, 1.0])
        forecast = forecast_from_total(total)
        user = ideal = (0.5, 0.5, 0.5, 0.5)
        suitors = SuitorSample(np.full((8, 4), 0.5), ("g",), seed=0)
        curve = open_option_utility(
            forecast, suitors, self.template(user, ideal), self.SINGLE, 400, seed=5
        )
        assert curve.mean[0] == pytest.approx(single_utility(self.SINGLE, 0.0))
        assert np.allclose(curve.mean[1:], 1.0, atol=1e-12)
        assert np.allclose(curve.p10[1:], 1.0, atol=1e-12)

    def test_two_step_hand_computed_mixture(self):
        # Hand evaluation on grid [0, 1, 2] months with dC = (0.5, 0.5).
        grid = np.array([0.0, 1.0, 2.0])
        forecast = forecast_from_total(np.array([0.0, 0.5, 1.0]), grid)
        suitors = SuitorSample(np.array([[0.5, 0.5, 0.5, 0.5]]), ("g",), seed=0)
        template = self.template()
        curve = open_option_utility(forecast, suitors, template, self.SINGLE, 1000, seed=9)

        u_single = lambda m: single_utility(self.SINGLE, m / 12.0)
        u_rel = lambda m: relationship_utility(template((0.5, 0.5, 0.5, 0.5)), m / 12.0)
        expected = [
            u_single(0.0),
            0.5 * u_single(1.0) + 0.5 * u_rel(0.0),
            0.5 * u_rel(1.0) + 0.5 * u_rel(0.0),
        ]
        assert np.allclose(curve.mean, expected, atol=1e-12)

        # mixture envelope: mean between the min and max of the single curve
        # and every realizable relationship value at each point
        for k, t in enumerate(grid):
            candidates = [u_single(t)] + [u_rel(t - tj) for tj in grid[1 : k + 1]]
            assert min(candidates) - 1e-12 <= curve.mean[k] <= max(candidates) + 1e-12

    def test_rollout_mean_converges_to_closed_form(self):
        # Rollouts are exact draws from the mixture, so their mean matches the
        # closed form within Monte Carlo error.
        grid = np.array([0.0, 1.0, 2.0])
        forecast = forecast_from_total(np.array([0.0, 0.4, 0.7]), grid)
        rng = np.random.default_rng(17)
        suitors = SuitorSample(rng.uniform(0.2, 0.8, size=(40, 4)), ("g",), seed=0)
        template = self.template()
        realizations = 10_000
        curve = open_option_utility(forecast, suitors, template, self.SINGLE, realizations, seed=23)

        # Re-simulate independently (plain loop oracle) to estimate the spread.
        all_curves = np.empty((realizations, 3))
        oracle_rng = np.random.default_rng(555)
        u_single = single_utility(self.SINGLE, grid / 12.0)
        per_suitor = np.array(
            [relationship_utility(template(tuple(s)), grid / 12.0) for s in suitors.suitors]
        )
        delta = np.diff(forecast.total, prepend=0.0)
        for r in range(realizations):
            u = oracle_rng.random()
            pick = oracle_rng.integers(0, len(suitors))
            row = u_single.copy()
            if u < delta[1]:
                row[1:] = per_suitor[pick][[0, 1]]
            elif u < delta[1] + delta[2]:
                row[2:] = per_suitor[pick][[0]]
            all_curves[r] = row
        oracle_mean = all_curves.mean(axis=0)
        oracle_sigma = all_curves.std(axis=0) / np.sqrt(realizations)
        assert np.all(np.abs(oracle_mean - curve.mean) <= 3 * oracle_sigma + 1e-12)

    def test_band_brackets_mean(self):
        grid = np.arange(0.0, 25.0)
        total = 1.0 - np.exp(-grid / 40.0)
        forecast = forecast_from_total(total, grid)
        rng = np.random.default_rng(31)
        suitors = SuitorSample(rng.random((30, 4)), ("g",), seed=0)
        curve = open_option_utility(forecast, suitors, self.template(), self.SINGLE, 300, seed=2)
        assert np.all(curve.p10 <= curve.mean + 1e-12)
        assert np.all(curve.p90 >= curve.mean - 1e-12)

    def test_deterministic_per_seed(self):
        grid = np.arange(0.0, 13.0)
        forecast = forecast_from_total(np.linspace(0.0, 0.6, 13), grid)
        rng = np.random.default_rng(41)
        suitors = SuitorSample(rng.random((25, 4)), ("g",), seed=0)
        a = open_option_utility(forecast, suitors, self.template(), self.SINGLE, 200, seed=6)
        b = open_option_utility(forecast, suitors, self.template(), self.SINGLE, 200, seed=6)
        assert np.array_equal(a.mean, b.mean)
        assert np.array_equal(a.p10, b.p10) and np.array_equal(a.p90, b.p90)

    def test_empty_suitors_with_positive_c_rejected(self):
        forecast = forecast_from_total(np.array([0.0, 0.3]), np.array([0.0, 1.0]))
        empty = SuitorSample(np.empty((0, 4)), ("g",), seed=0)
        with pytest.raises(ValidationError):
            open_option_utility(forecast, empty, self.template(), self.SINGLE, 10, seed=1)
