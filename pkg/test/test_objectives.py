# test/test_objectives.py
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import ABS_TOL, selection_of, small_instance, two_agent_coverage, two_agent_elements
from swarm.exceptions import InvalidArgumentError, InvalidProblemError
from swarm.models.selection_model import Selection
from swarm.objectives import (
    AreaCoverageObjective, AreaCoverageProblem, ProbCoverageObjective, ProbCoverageProblem, SumObjective,
    area_coverage_value, detection_success_prob, prob_coverage_from_area, prob_coverage_value,
)
from swarm.redundancy.checks import random_disjoint_sets


def _single_event_problem():
    return ProbCoverageProblem(
        event_positions=np.array([[0.5, 0.5]]),
        event_values=np.array([1.0]),
        failure=(np.array([[0.5], [1.0]]), np.array([[0.5]])),
    )


class TestProbCoverage:
    def test_independent_detections_combine(self):
        p = _single_event_problem()
        m = p.matroid()
        s = selection_of(m.element(0, 0), m.element(1, 0))
        assert prob_coverage_value(p, s) == pytest.approx(0.75, abs=ABS_TOL)
        assert prob_coverage_value(p, selection_of(m.element(0, 1))) == 0.0

    def test_weighted_coverage_values(self):
        f, m = two_agent_coverage()
        a1, a2, b1, b2 = two_agent_elements(m)
        assert f.evaluate(selection_of(a1)) == pytest.approx(2.0)
        assert f.evaluate(selection_of(a1, b1)) == pytest.approx(2.0)
        assert f.evaluate(selection_of(a2, b1)) == pytest.approx(3.0)
        assert f.evaluate(selection_of(a2, b2)) == pytest.approx(1.0)

    def test_invalid_probabilities(self):
        with pytest.raises(InvalidProblemError):
            ProbCoverageProblem(np.zeros((1, 2)), np.array([1.0]), (np.array([[1.5]]),))
        with pytest.raises(InvalidProblemError):
            ProbCoverageProblem(np.zeros((1, 2)), np.array([-1.0]), (np.array([[0.5]]),))
        with pytest.raises(InvalidProblemError):
            ProbCoverageProblem(np.zeros((2, 2)), np.array([1.0, 1.0]), (np.array([[0.5]]),))

    def test_agents_without_shared_events_do_not_interact(self):
        p = ProbCoverageProblem(
            np.zeros((2, 2)), np.array([1.0, 1.0]),
            (np.array([[0.2, 1.0]]), np.array([[1.0, 0.3]]), np.array([[0.9, 0.9]])),
        )
        f = ProbCoverageObjective(p)
        assert not f.may_interact(0, 1)
        assert f.may_interact(0, 2)

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_event_components_sum_to_objective(self, seed):
        f, m = small_instance(seed)
        s = random_disjoint_sets(m, np.random.default_rng(seed), 1)[0]
        total = SumObjective(f.event_components())
        assert total.evaluate(s) == pytest.approx(f.evaluate(s), abs=ABS_TOL)
        block = m.block(0)
        np.testing.assert_allclose(total.marginal_gains(block, s), f.marginal_gains(block, s), atol=ABS_TOL)


class TestSensorModel:
    def test_detection_at_zero_distance(self):
        assert detection_success_prob(0.0, 0.1) == 1.0

    def test_soft_disk_exponent(self):
        assert detection_success_prob(0.2, 0.2, radius_power=2) == pytest.approx(math.exp(-1.0))

    def test_default_exponent_scales_with_squared_radius(self):
        r = 0.3
        assert detection_success_prob(r * r, r) == pytest.approx(math.exp(-1.0))

    def test_vectorized(self):
        probs = detection_success_prob(np.array([0.0, 0.1, 1.0]), 0.5)
        assert probs.shape == (3,)
        assert np.all(np.diff(probs) < 0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidArgumentError):
            detection_success_prob(0.1, 0.0)
        with pytest.raises(InvalidArgumentError):
            detection_success_prob(-0.1, 0.5)

    def test_far_sensor_is_silent_zero(self):
        far = np.array([0.5, 1.0, 1.4])
        with warnings.catch_warnings(), np.errstate(all='raise'):
            warnings.simplefilter('error')
            probs = detection_success_prob(far, 0.05)
            single = detection_success_prob(1.4, 0.05)
        assert np.all(probs == 0.0)
        assert single == 0.0


class TestAreaCoverage:
    def test_large_disk_covers_square(self):
        p = AreaCoverageProblem((np.array([[0.5, 0.5]]),), sensor_radius=1.0, grid_resolution=32)
        f = AreaCoverageObjective(p)
        assert f.evaluate(selection_of(p.matroid().element(0, 0))) == pytest.approx(1.0)

    def test_small_disk_area(self):
        p = AreaCoverageProblem((np.array([[0.5, 0.5]]),), sensor_radius=0.2, grid_resolution=512)
        value = area_coverage_value(p, selection_of(p.matroid().element(0, 0)))
        assert value == pytest.approx(math.pi * 0.04, rel=1e-2)

    def test_centers_outside_square_rejected(self):
        with pytest.raises(InvalidProblemError):
            AreaCoverageProblem((np.array([[1.2, 0.5]]),), sensor_radius=0.1)
        with pytest.raises(InvalidProblemError):
            AreaCoverageProblem((np.array([[0.5, 0.5]]),), sensor_radius=0.0)

    @settings(max_examples=25)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_matches_cellwise_probabilistic_coverage(self, seed):
        rng = np.random.default_rng(seed)
        centers = tuple(rng.random((int(rng.integers(1, 4)), 2)) for _ in range(int(rng.integers(1, 4))))
        area = AreaCoverageProblem(centers, sensor_radius=float(rng.uniform(0.05, 0.4)), grid_resolution=24)
        cells = ProbCoverageObjective(prob_coverage_from_area(area))
        f = AreaCoverageObjective(area)
        for s in random_disjoint_sets(area.matroid(), rng, 3):
            assert f.evaluate(s) == pytest.approx(cells.evaluate(s), abs=1e-12)

    def test_cached_gains_match_fresh_evaluations(self, rng):
        centers = tuple(rng.random((3, 2)) for _ in range(4))
        p = AreaCoverageProblem(centers, sensor_radius=0.15, grid_resolution=64)
        f = AreaCoverageObjective(p, cache_size=2)
        m = p.matroid()
        base = Selection()
        for agent in range(m.n_agents):
            block = m.block(agent)
            gains = f.marginal_gains(block, base)
            fresh = [area_coverage_value(p, base.add(x)) - area_coverage_value(p, base) for x in block]
            np.testing.assert_allclose(gains, fresh, atol=1e-12)
            base = base.add(block[int(np.argmax(gains))])
