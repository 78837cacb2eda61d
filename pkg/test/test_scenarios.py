# test/test_scenarios.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarm.exceptions import ConfigError
from swarm.models.config_model import MixtureSpec, ScenarioConfig, ScenarioFamily
from swarm.netsim.comm_graph import CommGraph
from swarm.scenarios import (
    CoverageScenario, area_action_radius, area_sensor_radius, gen_area_coverage, gen_comm_study, gen_prob_sensing,
    gen_random_prob_coverage, gen_tracking, generate_scenario, probsense_action_radius, probsense_sensor_radius,
    sample_mixture, uniform_in_disk,
)
from swarm.tracking.tracking_trial import TrackingScenario

SMALL_GRID = {'grid_resolution': 64}


def test_radii():
    assert area_sensor_radius(50) == pytest.approx(math.sqrt(2 / (50 * math.pi)))
    assert area_action_radius(50) == pytest.approx(2 * area_sensor_radius(50))
    assert probsense_sensor_radius(50) == pytest.approx(math.sqrt(0.6 / (50 * math.pi)))
    assert probsense_action_radius(50) == pytest.approx(4 * probsense_sensor_radius(50))


def test_disk_samples_stay_in_square(rng):
    points = uniform_in_disk(np.array([0.05, 0.95]), 0.3, 200, rng)
    assert np.all((points >= 0) & (points <= 1))
    assert np.all(np.linalg.norm(points - [0.05, 0.95], axis=1) <= 0.3 + 1e-12)


def test_mixture_samples(rng):
    mixture = MixtureSpec(means=((0.2, 0.2),), sigma=0.01, weights=(1.0,))
    points = sample_mixture(mixture, 100, rng)
    assert np.allclose(points.mean(axis=0), [0.2, 0.2], atol=0.01)


def test_mixture_validation():
    with pytest.raises(ValueError):
        MixtureSpec(means=((0.2, 0.2),), weights=(0.5, 0.5))


class TestAreaCoverage:
    def test_shape(self, rng):
        scenario = gen_area_coverage(12, rng, SMALL_GRID)
        assert isinstance(scenario, CoverageScenario)
        assert scenario.matroid.blocks == (10,) * 12
        assert scenario.comm_range == pytest.approx(2 * scenario.action_radius)
        for agent, centers in enumerate(scenario.problem.action_centers):
            distance = np.linalg.norm(centers - scenario.positions[agent], axis=1)
            assert np.all(distance <= scenario.action_radius + 1e-12)

    def test_same_stream_same_scenario(self):
        a = gen_area_coverage(8, np.random.default_rng(3), SMALL_GRID)
        b = gen_area_coverage(8, np.random.default_rng(3), SMALL_GRID)
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_unknown_override(self, rng):
        with pytest.raises(ConfigError):
            gen_area_coverage(5, rng, {'n_events': 3})

    def test_solver_context_overrides(self, rng):
        scenario = gen_area_coverage(5, rng, SMALL_GRID)
        context = scenario.solver_context(gamma=0.1, comm_range=0.3)
        assert context.gamma == 0.1
        assert context.comm_range == 0.3
        assert context.redundancy_weights() is scenario.redundancy()


class TestProbSensing:
    def test_defaults(self, rng):
        scenario = gen_prob_sensing(20, rng)
        assert scenario.problem.n_events == 50
        assert scenario.problem.event_values.sum() == pytest.approx(1.0)
        assert scenario.gamma == pytest.approx(0.4 / 20)
        assert scenario.mixture == MixtureSpec()
        assert scenario.describe()['mixture']['sigma'] == MixtureSpec().sigma

    def test_overrides(self, rng):
        scenario = gen_prob_sensing(6, rng, {'n_events': 7, 'gamma': 0.5, 'actions_per_agent': 3,
                                             'mixture': {'means': [[0.5, 0.5]], 'sigma': 0.2, 'weights': [1.0]}})
        assert scenario.problem.n_events == 7
        assert scenario.gamma == 0.5
        assert scenario.matroid.blocks == (3,) * 6

    @settings(max_examples=20)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_probabilities_valid(self, seed):
        scenario = gen_prob_sensing(5, np.random.default_rng(seed), {'n_events': 10})
        for failure in scenario.problem.failure:
            assert np.all((failure >= 0) & (failure <= 1))


def test_comm_study_positions_connected(rng):
    scenario = gen_comm_study(20, rng, SMALL_GRID)
    assert scenario.comm_range == pytest.approx(3 * scenario.action_radius)
    assert CommGraph(scenario.positions, scenario.comm_range).is_connected()


def test_tracking_scenario(rng):
    scenario = gen_tracking(8, rng, seed=4)
    assert isinstance(scenario, TrackingScenario)
    assert scenario.world.side == 10
    assert scenario.n_robots == 8
    assert scenario.seed == 4


def test_tracking_overrides(rng):
    scenario = gen_tracking(8, rng, overrides={"grid_side": 6, "comm_range": 3.5, "target_range": 2.0})
    assert scenario.world.side == 6
    assert scenario.comm_range == pytest.approx(3.5)
    assert scenario.target_range == pytest.approx(2.0)
    assert all(0 <= c < 36 for c in scenario.robot_cells + scenario.target_cells)

    defaults = gen_tracking(8, rng)
    assert defaults.comm_range == pytest.approx(20.0)
    assert defaults.target_range == pytest.approx(12.0)


def test_tracking_unknown_override(rng):
    with pytest.raises(ConfigError):
        gen_tracking(4, rng, overrides={"sensor_radius": 0.1})


def test_random_instances_are_small(rng):
    for _ in range(50):
        f, m = gen_random_prob_coverage(rng)
        assert 1 <= m.n_agents <= 4
        assert max(m.blocks) <= 4
        assert f.problem.n_events <= 6


@pytest.mark.parametrize("family, expected", [
    (ScenarioFamily.AREA_COVERAGE, CoverageScenario),
    (ScenarioFamily.PROB_SENSING, CoverageScenario),
    (ScenarioFamily.TRACKING, TrackingScenario),
])
def test_generate_dispatch(family, expected, rng):
    overrides = SMALL_GRID if family == ScenarioFamily.AREA_COVERAGE else {}
    config = ScenarioConfig(family=family, n_agents=4, seed=1, overrides=overrides)
    assert isinstance(generate_scenario(config, rng), expected)
