# test/test_tracking.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.stats import chisquare, norm

from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import Selection
from swarm.scenarios.generators import gen_tracking
from swarm.solvers.base_solver import block_argmax
from swarm.tracking import (
    GridWorld, TargetFilter, TrackingConfig, TrackingNoise, TrackingObjective, TrackingScenario, action_sequences,
    filter_entropy, filter_predict, filter_update, grid_side, plan_single_robot, range_mean_var,
    range_measurement, run_tracking_trial, target_step,
)
from swarm.tracking import tracking_trial
from swarm.tracking.robot_planner import distinct_paths

NORTH, SOUTH, EAST, WEST = 1, 2, 3, 4


# ============1. 网格世界===============

class TestGridWorld:
    def test_side_scales_with_robots(self):
        assert grid_side(8) == 10
        assert grid_side(96) == 35
        assert grid_side(1) == 4

    def test_off_grid_moves_stay(self):
        world = GridWorld(4)
        assert world.move(0, SOUTH) == 0
        assert world.move(0, WEST) == 0
        assert world.move(0, EAST) == 1
        assert world.move(0, NORTH) == 4
        assert world.move(15, NORTH) == 15

    def test_batch_move(self):
        world = GridWorld(4)
        assert world.move([0, 5], [EAST, 0]).tolist() == [1, 5]

    def test_sequences_and_paths(self):
        sequences = action_sequences(2)
        assert len(sequences) == 25
        assert sequences[0] == (0, 0)
        assert GridWorld(4).follow(0, (EAST, NORTH)) == (1, 5)

    def test_cell_checks(self):
        with pytest.raises(InvalidArgumentError):
            GridWorld(1)
        with pytest.raises(InvalidArgumentError):
            GridWorld(3).check_cell(9)

    def test_range_model_saturates(self):
        mean, var = range_mean_var(30.0)
        assert mean == 20.0
        assert var == pytest.approx(0.25 + 0.5 * 400.0)

    def test_target_walk_stays_on_grid(self, rng):
        world = GridWorld(3)
        cell = 4
        for _ in range(200):
            cell = target_step(cell, world, rng)
            world.check_cell(cell)
        assert np.isfinite(range_measurement(0, cell, rng, world))

    def test_interior_walk_is_uniform(self):
        world = GridWorld(5)
        rng = np.random.default_rng(8)
        start = world.cell_of(2, 2)
        landed = [target_step(start, world, rng) for _ in range(5000)]
        neighbors = [start, world.cell_of(2, 3), world.cell_of(2, 1), world.cell_of(3, 2), world.cell_of(1, 2)]
        counts = [landed.count(c) for c in neighbors]
        assert sum(counts) == len(landed)
        assert chisquare(counts).pvalue > 1e-3

    @pytest.mark.parametrize("x, expected_mean", [(3, 3.0), (25, 20.0)])
    def test_range_measurement_moments(self, x, expected_mean):
        world = GridWorld(30)
        rng = np.random.default_rng(x)
        samples = np.array([range_measurement(0, world.cell_of(x, 0), rng, world) for _ in range(20000)])
        expected_var = 0.25 + 0.5 * expected_mean ** 2
        assert samples.mean() == pytest.approx(expected_mean, abs=4.0 * math.sqrt(expected_var / len(samples)))
        assert samples.var() == pytest.approx(expected_var, rel=0.05)


# ============2. 直方图滤波===============

class TestTargetFilter:
    def test_entropy_limits(self):
        world = GridWorld(5)
        assert TargetFilter.point_mass(world, 7).entropy() == 0.0
        assert TargetFilter.uniform(world).entropy() == pytest.approx(math.log2(25))

    def test_invalid_distribution(self):
        with pytest.raises(InvalidArgumentError):
            TargetFilter(np.array([0.5, 0.6]))

    def test_prediction_spreads_point_mass(self):
        world = GridWorld(5)
        predicted = filter_predict(TargetFilter.point_mass(world, 12), world)
        assert predicted.probs[12] == pytest.approx(0.2)
        assert predicted.probs[[7, 11, 13, 17]] == pytest.approx([0.2] * 4)

    def test_corner_keeps_blocked_moves(self):
        world = GridWorld(3)
        predicted = filter_predict(TargetFilter.point_mass(world, 0), world)
        assert predicted.probs[0] == pytest.approx(0.6)

    @settings(max_examples=50)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.sampled_from([0.0, 1e-3]))
    def test_mass_conserved_and_entropy_bounded(self, seed, threshold):
        rng = np.random.default_rng(seed)
        world = GridWorld(int(rng.integers(2, 8)))
        f = TargetFilter(rng.dirichlet(np.ones(world.n_cells)), threshold)
        for _ in range(5):
            f = filter_predict(f, world)
            assert abs(f.probs.sum() - 1.0) < 1e-9
            f = filter_update(f, world, int(rng.integers(world.n_cells)), float(rng.uniform(0, 6)))
            assert abs(f.probs.sum() - 1.0) < 1e-9
            assert filter_entropy(f) <= math.log2(world.n_cells) + 1e-9

    def test_underflow_falls_back_to_prior(self):
        world = GridWorld(4)
        prior = TargetFilter.uniform(world)
        updated = filter_update(prior, world, 0, 1e6)
        assert updated.underflowed
        np.testing.assert_allclose(updated.probs, prior.probs)

    def test_measurement_concentrates_belief(self):
        world = GridWorld(6)
        prior = TargetFilter.uniform(world)
        updated = filter_update(prior, world, 0, 0.0)
        assert updated.entropy() < prior.entropy()
        assert int(np.argmax(updated.probs)) == 0


# ============3. 互信息目标===============

def _objective(seed: int = 0, n_samples: int = 8) -> TrackingObjective:
    world = GridWorld(5)
    filters = [TargetFilter.point_mass(world, 6), TargetFilter.point_mass(world, 18)]
    noise = TrackingNoise.draw(np.random.default_rng(seed), n_samples, 2, 2, 2)
    return TrackingObjective(world, filters, [0, 24], noise)


class TestTrackingObjective:
    def test_normalized_and_non_negative(self):
        f = _objective()
        m = f.matroid()
        assert m.blocks == (25, 25)
        assert f.evaluate(Selection()) == 0.0
        assert f.evaluate(Selection((m.element(0, 3), m.element(1, 7)))) >= 0.0

    def test_sum_over_targets(self):
        f = _objective()
        m = f.matroid()
        s = Selection((m.element(0, 3), m.element(1, 7)))
        assert sum(c.evaluate(s) for c in f.components()) == pytest.approx(f.evaluate(s), abs=1e-12)

    def test_gains_match_evaluations(self):
        f = _objective()
        m = f.matroid()
        base = Selection((m.element(0, 4),))
        block = m.block(1)
        gains = f.marginal_gains(block, base)
        fresh = [f.evaluate(base.add(x)) - f.evaluate(base) for x in block]
        np.testing.assert_allclose(gains, fresh, atol=1e-9)

    def test_shared_noise_replays(self):
        a, b = _objective(seed=3), _objective(seed=3)
        s = Selection((a.matroid().element(0, 12),))
        assert a.evaluate(s) == b.evaluate(s)

    def test_noise_must_match_team(self):
        world = GridWorld(5)
        noise = TrackingNoise.draw(np.random.default_rng(0), 4, 1, 2, 1)
        with pytest.raises(InvalidArgumentError):
            TrackingObjective(world, [TargetFilter.uniform(world)] * 2, [0, 1], noise)

    def test_restricted_view_drops_far_targets(self):
        f = _objective()
        view = f.restricted_to(0, target_range=2.0, robot_range=0.5)
        assert view.targets == (0,)
        assert view.robots == frozenset({0})

    @pytest.mark.parametrize("robot", [0, 1])
    def test_single_robot_planner_matches_block_argmax(self, robot):
        f = _objective(seed=robot)
        m = f.matroid()
        base = Selection((m.element(1 - robot, 6),))
        x, gain = plan_single_robot(f, m, robot, base)
        expected, expected_gain = block_argmax(f, m, robot, base)
        assert x.key == expected.key
        assert gain == pytest.approx(expected_gain, abs=1e-12)

    def test_corner_paths_deduplicated(self):
        m = _objective().matroid()
        candidates = m.block(0)
        representatives, owner = distinct_paths(candidates)
        # 角落：第一步只有 停留/北/东 三种结果，随后分别有 3、4、4 种
        assert len(representatives) == 11
        assert len({tuple(x.payload_ref) for x in candidates}) == 11
        for k, x in enumerate(candidates):
            rep = representatives[owner[k]]
            assert tuple(rep.payload_ref) == tuple(x.payload_ref)
            assert rep.action_id <= x.action_id

    def test_planner_moves_toward_target(self):
        world = GridWorld(7)
        robot, target = world.cell_of(3, 0), world.cell_of(3, 3)
        noise = TrackingNoise.draw(np.random.default_rng(2), 200, 1, 2, 1)
        f = TrackingObjective(world, [TargetFilter.point_mass(world, target)], [robot], noise)
        x, gain = plan_single_robot(f, f.matroid(), 0, Selection())
        assert gain > 0.0
        assert world.distance(x.payload_ref[-1], target) < world.distance(robot, target)

    def test_information_matches_quadrature(self):
        world = GridWorld(2)
        prior = TargetFilter(np.array([0.5, 0.5, 0.0, 0.0]))
        predicted = np.array([0.4, 0.4, 0.1, 0.1])
        np.testing.assert_allclose(filter_predict(prior, world).probs, predicted, atol=1e-12)

        mean, var = range_mean_var(world.distances_from(0))
        sd = np.sqrt(var)

        def mixture(y):
            return float(np.dot(predicted, norm.pdf(y, mean, sd)))

        def integrand(y):
            p = mixture(y)
            return -p * math.log(p) if p > 0 else 0.0

        h_y, _ = quad(integrand, -15.0, 20.0, limit=200)
        h_y_given_x = float(np.dot(predicted, 0.5 * np.log(2 * math.pi * math.e * var)))
        expected = (h_y - h_y_given_x) / math.log(2)

        noise = TrackingNoise.draw(np.random.default_rng(17), 40000, 1, 1, 1)
        f = TrackingObjective(world, [prior], [0], noise, horizon=1)
        value = f.evaluate(Selection((f.matroid().element(0, 0),)))
        assert expected > 0.05
        assert value == pytest.approx(expected, rel=0.03)

    def test_gains_non_negative_on_average(self):
        diffs = []
        for seed in range(20):
            f = _objective(seed=seed, n_samples=16)
            m = f.matroid()
            base = Selection((m.element(0, 3),))
            diffs.append(f.evaluate(base.add(m.element(1, 7))) - f.evaluate(base))
        diffs = np.asarray(diffs)
        assert diffs.mean() >= -3.0 * diffs.std() / math.sqrt(len(diffs))


# ============4. 仿真试验===============

@pytest.fixture
def short_config():
    return TrackingConfig(trial_length=4, burn_in=1, n_samples=4)


class TestTrackingTrial:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrackingConfig(n_samples=0)
        with pytest.raises(ValueError):
            TrackingConfig(burn_in=-1)

    def test_sparse_threshold_by_team_size(self):
        config = TrackingConfig()
        assert config.threshold_for(8) == 0.0
        assert config.threshold_for(16) == pytest.approx(1e-3)
        assert TrackingConfig(sparse_threshold=0.01).threshold_for(96) == pytest.approx(0.01)

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            TrackingScenario(GridWorld(4), (0, 1), (2,))

    def test_known_initial_targets(self):
        scenario = gen_tracking(3, np.random.default_rng(0))
        assert all(f.entropy() == 0.0 for f in scenario.initial_filters())

    @pytest.mark.parametrize("solver", ["sequential", "myopic", "rsp:2", "random"])
    def test_runs_and_records_each_step(self, solver, short_config):
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        result = run_tracking_trial(scenario, solver, np.random.default_rng(1), short_config)
        assert [r.step for r in result.records] == [1, 2, 3, 4]
        assert np.all(np.isfinite(result.entropies))
        assert result.summary_entropy == pytest.approx(result.entropies[1:].mean())

    def test_replay_is_deterministic(self, short_config):
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        first = run_tracking_trial(scenario, "rsp:2", np.random.default_rng(9), short_config, trial=2)
        second = run_tracking_trial(scenario, "rsp:2", np.random.default_rng(9), short_config, trial=2)
        assert first.entropies.tolist() == second.entropies.tolist()

    def test_capacity_weights_recorded(self):
        config = TrackingConfig(trial_length=2, burn_in=0, n_samples=2, weight_interval=1)
        scenario = gen_tracking(2, np.random.default_rng(4), seed=4)
        result = run_tracking_trial(scenario, "rrsp:2", np.random.default_rng(0), config)
        assert result.weight_per_robot is not None
        assert result.weight_per_robot >= 0.0

    @pytest.mark.parametrize("solver", ["sequential", "myopic", "rsp:2", "rrsp:2"])
    def test_bounds_and_messages_per_step(self, solver, short_config):
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        result = run_tracking_trial(scenario, solver, np.random.default_rng(1), short_config)
        assert [b.step for b in result.bounds] == [1, 2, 3, 4]
        for bound, record in zip(result.bounds, result.records):
            assert bound.value == pytest.approx(record.objective)
            assert bound.online >= bound.value - 1e-9
            assert bound.posthoc >= bound.value - 1e-9
        assert [step for step, _ in result.messages] == [1, 2, 3, 4]
        if solver == "myopic":
            assert all(stats.messages == 0 for _, stats in result.messages)
        if solver == "sequential":
            assert all(stats.messages > 0 for _, stats in result.messages)

    def test_bounds_can_be_switched_off(self):
        config = TrackingConfig(trial_length=2, burn_in=0, n_samples=2, compute_bounds=False)
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        result = run_tracking_trial(scenario, "rsp:2", np.random.default_rng(1), config)
        assert result.bounds == []
        assert len(result.messages) == 2

    def test_bounds_do_not_change_the_run(self, short_config):
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        quiet = TrackingConfig(trial_length=4, burn_in=1, n_samples=4, compute_bounds=False)
        with_bounds = run_tracking_trial(scenario, "rsp:2", np.random.default_rng(9), short_config)
        without = run_tracking_trial(scenario, "rsp:2", np.random.default_rng(9), quiet)
        assert with_bounds.entropies.tolist() == without.entropies.tolist()

    def test_scenario_ranges_validated(self):
        with pytest.raises(ValueError):
            TrackingScenario(GridWorld(4), (0,), (2,), comm_range=0.0)
        with pytest.raises(ValueError):
            TrackingScenario(GridWorld(4), (0,), (2,), target_range=-1.0)

    @pytest.mark.parametrize("solver", ["sequential", "rsp:2"])
    def test_trial_plans_robots_with_single_robot_planner(self, solver, monkeypatch):
        calls = []

        def spy(objective, matroid, robot, prior, *args):
            calls.append(robot)
            return plan_single_robot(objective, matroid, robot, prior, *args)

        monkeypatch.setattr(tracking_trial, 'plan_single_robot', spy)
        config = TrackingConfig(trial_length=2, burn_in=0, n_samples=2, compute_bounds=False)
        scenario = gen_tracking(3, np.random.default_rng(5), seed=5)
        run_tracking_trial(scenario, solver, np.random.default_rng(1), config)
        assert sorted(calls) == [0, 0, 1, 1, 2, 2]
