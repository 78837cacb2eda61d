# test/test_setfun.py
import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fixtures import ABS_TOL, selection_of, small_instance, two_agent_coverage, two_agent_elements
from swarm.exceptions import EnumerationTooLargeError, InvalidArgumentError, InvalidProblemError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.redundancy.checks import random_disjoint_sets
from swarm.setfun.set_function import (
    CountingObjective, best_index, brute_force_optimum, derivative, marginal_gain, matroid_feasible,
    second_derivative,
)


@pytest.fixture
def t1():
    f, m = two_agent_coverage()
    return f, m, two_agent_elements(m)


class TestSelection:
    def test_duplicate_element_rejected(self):
        x = GroundElement(0, 1)
        with pytest.raises(InvalidArgumentError):
            Selection((x, GroundElement(0, 1)))
        with pytest.raises(InvalidArgumentError):
            Selection((x,)).add(x)

    def test_order_is_decision_order(self):
        s = Selection().add(GroundElement(2, 0)).add(GroundElement(0, 3))
        assert s.agents() == [2, 0]
        assert s.prefix(1).keys() == ((2, 0),)
        assert s.restrict_to([0]).keys() == ((0, 3),)

    def test_union_skips_present_elements(self):
        s = Selection((GroundElement(0, 0),)).union([GroundElement(0, 0), GroundElement(1, 1)])
        assert s.keys() == ((0, 0), (1, 1))

    def test_payload_does_not_affect_identity(self):
        assert GroundElement(1, 2, payload_ref=(0.5, 0.5)) == GroundElement(1, 2)


class TestMatroid:
    def test_empty_block_is_invalid(self):
        with pytest.raises(InvalidProblemError):
            SimplePartitionMatroid((2, 0, 1))

    def test_out_of_range_element(self):
        m = SimplePartitionMatroid((2, 3))
        with pytest.raises(InvalidArgumentError):
            m.element(0, 2)
        with pytest.raises(InvalidArgumentError):
            m.element(2, 0)

    def test_n_bases(self):
        assert SimplePartitionMatroid((2, 3, 4)).n_bases() == 24

    def test_feasibility(self, t1):
        _, m, (a1, a2, b1, b2) = t1
        assert matroid_feasible(m, selection_of(a1, b2))
        assert matroid_feasible(m, Selection())
        assert not matroid_feasible(m, selection_of(a1, a2))


class TestDerivatives:
    def test_normalized(self, t1):
        f, _, _ = t1
        assert f.evaluate(Selection()) == 0.0

    def test_marginal_gain(self, t1):
        f, _, (a1, _, _, b2) = t1
        assert marginal_gain(f, b2, selection_of(a1)) == pytest.approx(1.0, abs=ABS_TOL)

    def test_marginal_gain_of_present_element(self, t1):
        f, _, (a1, _, _, _) = t1
        with pytest.raises(InvalidArgumentError):
            marginal_gain(f, a1, selection_of(a1))

    def test_second_derivative_of_overlapping_actions(self, t1):
        f, _, (a1, _, b1, _) = t1
        assert second_derivative(f, a1, b1, Selection()) == pytest.approx(-2.0, abs=ABS_TOL)

    def test_second_derivative_needs_distinct_elements(self, t1):
        f, _, (a1, _, _, _) = t1
        with pytest.raises(InvalidArgumentError):
            second_derivative(f, a1, a1, Selection())

    def test_set_derivative(self, t1):
        f, _, (a1, _, b1, b2) = t1
        assert derivative(f, [b1, b2], selection_of(a1)) == pytest.approx(1.0, abs=ABS_TOL)
        with pytest.raises(InvalidArgumentError):
            derivative(f, [a1], selection_of(a1))

    def test_batched_gains_match_single_evaluations(self, t1):
        f, m, (a1, a2, b1, b2) = t1
        base = selection_of(a1)
        gains = f.marginal_gains([a1, a2, b1, b2], base)
        expected = [0.0] + [f.evaluate(base.add(x)) - f.evaluate(base) for x in (a2, b1, b2)]
        np.testing.assert_allclose(gains, expected, atol=ABS_TOL)

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_chain_rule(self, seed):
        f, m = small_instance(seed)
        rng = np.random.default_rng(seed)
        base, ys = random_disjoint_sets(m, rng, 2)
        total = derivative(f, ys, base)
        prefix = base
        stepwise = 0.0
        for y in ys:
            stepwise += marginal_gain(f, y, prefix)
            prefix = prefix.add(y)
        assert total == pytest.approx(stepwise, abs=ABS_TOL)


class TestBruteForce:
    def test_two_agent_optimum(self, t1):
        f, m, (a1, _, _, b2) = t1
        selection, value = brute_force_optimum(f, m)
        assert selection.keys() == selection_of(a1, b2).keys()
        assert value == pytest.approx(3.0, abs=ABS_TOL)

    def test_enumeration_cap(self, t1):
        f, m, _ = t1
        with pytest.raises(EnumerationTooLargeError) as info:
            brute_force_optimum(f, m, cap=3)
        assert info.value.size == 4 and info.value.cap == 3

    def test_enumeration_error_survives_pickling(self):
        error = pickle.loads(pickle.dumps(EnumerationTooLargeError(10, 5)))
        assert (error.size, error.cap) == (10, 5)
        assert "exceeds cap 5" in str(error)


def test_best_index_breaks_ties_by_position():
    assert best_index([1.0, 3.0, 3.0 - 1e-14, 2.0]) == 1
    assert best_index([0.5, 0.5]) == 0


def test_counting_objective_counts_candidates(t1):
    f, m, (a1, _, _, _) = t1
    counted = CountingObjective(f)
    counted.marginal_gains(m.block(1), selection_of(a1))
    counted.evaluate(selection_of(a1))
    assert counted.count == 2
    assert counted.value_calls == 1
    # 透传具体目标的属性
    assert len(counted.event_components()) == 2
