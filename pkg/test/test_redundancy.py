# test/test_redundancy.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from fixtures import ABS_TOL, small_instance, two_agent_coverage, two_agent_elements
from swarm.exceptions import InvalidArgumentError
from swarm.models.result_model import TrackingStepBound
from swarm.models.selection_model import Selection
from swarm.redundancy import (
    CHECKS, RedundancyGraph, alpha_estimate, bound_report, capacity_weights, check_sum_decomposition,
    deleted_edge_weight, distributed_costs, dsga_psi, online_bounds, pairwise_weight, planner_costs,
    posthoc_bound, posthoc_cost_bound, posthoc_terms, random_disjoint_sets, redundancy_graph, run_all_checks,
    run_check,
)
from swarm.services.tinycheck_service import coverage_instances, mutant_instances
from swarm.setfun.set_function import brute_force_optimum
from swarm.solvers import PlannerDag, dsga_plan, general_greedy, myopic_plan, random_plan, sequential_greedy

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@pytest.fixture
def t1():
    return two_agent_coverage()


class TestRedundancyGraph:
    def test_two_agent_weight(self, t1):
        f, m = t1
        graph = redundancy_graph(f, m)
        assert graph.weight(0, 1) == pytest.approx(2.0)
        assert graph.total_weight == pytest.approx(2.0)
        assert graph.per_agent_weight().tolist() == pytest.approx([2.0, 2.0])

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            RedundancyGraph(np.array([[0.0, 1.0], [0.5, 0.0]]))
        with pytest.raises(InvalidArgumentError):
            RedundancyGraph(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        with pytest.raises(InvalidArgumentError):
            RedundancyGraph(np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(InvalidArgumentError):
            RedundancyGraph(np.zeros(3))

    def test_weights_are_read_only(self, t1):
        graph = redundancy_graph(*t1)
        with pytest.raises(ValueError):
            graph.weights[0, 1] = 5.0

    def test_pairwise_weight_needs_distinct_agents(self, t1):
        f, m = t1
        with pytest.raises(InvalidArgumentError):
            pairwise_weight(f, m.block(0), m.block(0))

    @settings(max_examples=50)
    @given(seeds)
    def test_parallel_matches_serial(self, seed):
        f, m = small_instance(seed)
        np.testing.assert_allclose(redundancy_graph(f, m).weights, redundancy_graph(f, m, max_workers=3).weights)

    def test_alpha_estimate(self, t1):
        graph = redundancy_graph(*t1)
        assert alpha_estimate(graph, 3.0) == pytest.approx(2.0 / 3.0)
        assert alpha_estimate(graph, 0.0) is None


class TestCapacityWeights:
    def test_two_agent_capacities(self, t1):
        f, m = t1
        weights = capacity_weights(f.event_components(), m, f)
        # min(2, 2) + min(1, 1)
        assert weights.weight(0, 1) == pytest.approx(3.0)

    def test_wrong_decomposition_rejected(self, t1):
        f, m = t1
        with pytest.raises(InvalidArgumentError):
            check_sum_decomposition(f.event_components()[:1], f, m)

    @given(seeds)
    def test_capacity_dominates_exact_weight(self, seed):
        f, m = small_instance(seed)
        exact = redundancy_graph(f, m)
        capacity = capacity_weights(f.event_components(), m, f)
        assert np.all(capacity.weights >= exact.weights - ABS_TOL)


class TestBounds:
    def test_myopic_posthoc_bound(self, t1):
        f, m = t1
        result = myopic_plan(f, m)
        graph = redundancy_graph(f, m)
        assert deleted_edge_weight(graph, result.dag) == pytest.approx(2.0)
        assert posthoc_bound(result, graph) == pytest.approx(6.0)

    def test_online_and_oblivious(self, t1):
        f, m = t1
        online, oblivious = online_bounds(f, m, general_greedy(f, m).selection)
        assert online == pytest.approx(3.0)
        assert oblivious == pytest.approx(4.0)

    def test_dsga_psi(self, t1):
        result = dsga_plan(*t1, n_d=1)
        assert dsga_psi(result) == pytest.approx(1.0)
        assert dsga_psi(result.trace) == pytest.approx(1.0)
        assert dsga_psi(result.trace['commits']) == pytest.approx(1.0)

    def test_dag_size_mismatch(self, t1):
        graph = redundancy_graph(*t1)
        with pytest.raises(InvalidArgumentError):
            deleted_edge_weight(graph, PlannerDag.empty(3))

    def test_costs(self, t1):
        f, m = t1
        myopic = myopic_plan(f, m)
        assert distributed_costs(f, myopic) == pytest.approx([0.0, 2.0])
        assert posthoc_cost_bound(f, myopic) == pytest.approx(6.0)
        assert planner_costs(f, m, myopic) == pytest.approx([0.0, 0.0])
        assert distributed_costs(f, sequential_greedy(f, m)) == pytest.approx([0.0, 0.0])


class TestBoundReport:
    def test_sequential(self, t1):
        f, m = t1
        report = bound_report(f, m, sequential_greedy(f, m))
        assert report.deleted_weight == 0.0
        assert report.posthoc == pytest.approx(6.0)
        assert report.online == pytest.approx(3.0)
        assert report.oblivious == pytest.approx(4.0)
        assert report.subopt_lb == pytest.approx(1.0)

    def test_myopic_with_graph(self, t1):
        f, m = t1
        graph = redundancy_graph(f, m)
        report = bound_report(f, m, myopic_plan(f, m), graph)
        assert report.deleted_weight == pytest.approx(2.0)
        assert report.posthoc == pytest.approx(6.0)
        assert report.online == pytest.approx(4.0)
        assert report.subopt_lb == pytest.approx(0.5)
        assert report.alpha == pytest.approx(1.0)

    def test_deleted_edges_without_graph(self, t1):
        f, m = t1
        assert math.isinf(bound_report(f, m, myopic_plan(f, m)).posthoc)

    def test_dsga_uses_psi(self, t1):
        f, m = t1
        report = bound_report(f, m, dsga_plan(f, m, n_d=1))
        assert report.posthoc == pytest.approx(7.0)

    def test_random_plan_has_no_posthoc_bound(self, t1, rng):
        f, m = t1
        assert math.isinf(bound_report(f, m, random_plan(m, rng, f)).posthoc)

    def test_posthoc_terms_match_report(self, t1, rng):
        f, m = t1
        graph = redundancy_graph(f, m)
        assert posthoc_terms(myopic_plan(f, m), graph) == pytest.approx((6.0, 2.0))
        assert posthoc_terms(sequential_greedy(f, m)) == pytest.approx((6.0, 0.0))
        assert posthoc_terms(dsga_plan(f, m, n_d=1)) == pytest.approx((7.0, 0.0))
        assert math.isinf(posthoc_terms(myopic_plan(f, m))[0])
        assert math.isinf(posthoc_terms(random_plan(m, rng, f), graph)[0])

    def test_tracking_step_bound_rejects_low_bounds(self):
        bound = TrackingStepBound(step=1, value=1.0, posthoc=2.0, online=1.5)
        assert bound.deleted_weight == 0.0
        with pytest.raises(ValidationError):
            TrackingStepBound(step=1, value=1.0, posthoc=2.0, online=0.5)
        with pytest.raises(ValidationError):
            TrackingStepBound(step=0, value=1.0, posthoc=2.0, online=2.0)

    @given(seeds)
    def test_bounds_dominate_optimum(self, seed):
        f, m = small_instance(seed)
        _, optimum = brute_force_optimum(f, m)
        report = bound_report(f, m, myopic_plan(f, m), redundancy_graph(f, m))
        assert min(report.posthoc, report.online, report.oblivious) >= optimum - ABS_TOL


class TestChecks:
    def test_disjoint_sets(self, rng):
        f, m = small_instance(11)
        for _ in range(20):
            groups = random_disjoint_sets(m, rng, 3)
            keys = [k for g in groups for k in g.keys()]
            assert len(keys) == len(set(keys))

    def test_all_checks_pass_on_coverage(self, rng):
        outcomes = run_all_checks(coverage_instances, rng, cases=40)
        assert [o.name for o in outcomes] == [name for name, _ in CHECKS]
        failed = [(o.name, o.worst_violation, o.detail) for o in outcomes if not o.passed]
        assert failed == []

    def test_mutant_is_caught(self, rng):
        outcomes = {o.name: o for o in run_all_checks(mutant_instances, rng, cases=40)}
        assert outcomes['monotone'].failures > 0
        assert sum(o.failures for o in outcomes.values()) > 0

    def test_business_errors_count_as_failures(self, rng):
        def broken(f, m, rng):
            raise InvalidArgumentError("not decomposable")

        outcome = run_check("broken", broken, coverage_instances, rng, cases=3)
        assert outcome.failures == 3
        assert outcome.detail == "not decomposable"
        assert not outcome.passed
