# test/test_acceptance.py
"""全规模验收实验，运行时间为分钟级：pytest -m "not slow" 跳过"""
import math
import time

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import random_connected_graph
from swarm.models.config_model import ExperimentConfig, ScenarioFamily
from swarm.netsim import nominal_acceptance_rate, sync_epoch_sim
from swarm.redundancy import CHECKS, run_all_checks
from swarm.scenarios.generators import gen_random_prob_coverage
from swarm.services import ExperimentMode, ExperimentService, ExperimentServiceConfig
from swarm.services.tinycheck_service import coverage_instances
from swarm.solvers import general_greedy, global_auction, local_auction
from swarm.tracking import GridWorld, TargetFilter, TrackingConfig, filter_predict, filter_update
from utils.io_handler import read_csv

pytestmark = pytest.mark.slow


def _experiment(tmp_path, mode, jobs=None, compute_bounds=False, tracking=None, **fields):
    config = ExperimentServiceConfig(out_dir=tmp_path, jobs=jobs, mode=mode, compute_bounds=compute_bounds)
    if tracking is not None:
        config.tracking = tracking
    return ExperimentService(ExperimentConfig(**fields), config).run()


def paired_gap(results: pd.DataFrame, lower: str, higher: str, column: str = 'objective'):
    """同一 (n, trial) 上 higher − lower 的均值与标准误"""
    table = results.pivot_table(index=['n_agents', 'trial'], columns='solver', values=column)
    diff = table[higher] - table[lower]
    return float(diff.mean()), float(diff.std(ddof=1) / math.sqrt(len(diff)))


def test_small_instance_bounds_and_properties(rng):
    outcomes = run_all_checks(coverage_instances, rng, cases=1000)
    assert [o.name for o in outcomes] == [name for name, _ in CHECKS]
    assert [(o.name, o.failures) for o in outcomes if not o.passed] == []


def test_area_coverage_approaches_sequential(tmp_path):
    order = ["random", "myopic", "rsp:2", "rsp:4", "rsp:8", "sequential"]
    results = _experiment(tmp_path, ExperimentMode.COVERAGE, family=ScenarioFamily.AREA_COVERAGE,
                          n_agents=[50], trials=50, seed=0, solver=order).results
    for lower, higher in zip(order[:-2], order[1:-1]):
        gap, stderr = paired_gap(results, lower, higher)
        assert gap > 2 * stderr, f"{lower} < {higher} not significant"
    gap, _ = paired_gap(results, "rsp:8", "sequential")
    assert gap >= -1e-9

    myopic_gap, _ = paired_gap(results, "myopic", "sequential")
    rsp8_gap, _ = paired_gap(results, "rsp:8", "sequential")
    assert myopic_gap >= 4 * rsp8_gap


def test_adaptive_rounds_limit_deleted_weight(tmp_path):
    gamma = 8e-3
    solvers = ["rsp:global", "rsp:local", "sequential"]
    artifacts = _experiment(tmp_path, ExperimentMode.PROBSENSE, compute_bounds=True,
                            family=ScenarioFamily.PROB_SENSING, n_agents=[50], trials=50, seed=0,
                            solver=solvers, gamma=gamma)
    bounds = read_csv(tmp_path / 'bounds.csv')
    means = artifacts.results.groupby('solver')['objective'].mean()
    for solver in ("rsp:global", "rsp:local"):
        assert bounds.loc[bounds['solver'] == solver, 'deleted_weight'].mean() <= 50 * gamma
        assert means[solver] >= 0.95 * means['sequential']


def test_range_limit_costs_little(tmp_path):
    # 概率感知场景默认 r_c = 2 r_a
    results = _experiment(tmp_path, ExperimentMode.PROBSENSE, family=ScenarioFamily.PROB_SENSING,
                          n_agents=[50], trials=50, seed=0, solver=["rsp:4", "rrsp:4"]).results
    means = results.groupby('solver')['objective'].mean()
    assert means['rrsp:4'] >= 0.98 * means['rsp:4']


def test_coordination_lowers_target_entropy(tmp_path):
    results = _experiment(tmp_path, ExperimentMode.TRACK, family=ScenarioFamily.TRACKING,
                          n_agents=[8], trials=20, seed=0, solver=["myopic", "sequential", "rsp:4", "random"],
                          tracking=TrackingConfig(trial_length=100, burn_in=20)).results
    myopic = results.loc[results['solver'] == 'myopic', 'objective'].mean()
    for solver in ("sequential", "rsp:4"):
        gap, stderr = paired_gap(results, solver, "myopic")
        assert gap >= 0.03 * myopic
        assert gap > 2 * stderr
    random_gap, _ = paired_gap(results, "sequential", "random")
    assert random_gap >= 0.0


def test_range_limited_tracking_full_length(tmp_path):
    start = time.perf_counter()
    results = _experiment(tmp_path, ExperimentMode.TRACK, family=ScenarioFamily.TRACKING,
                          n_agents=[32], trials=1, seed=0, solver=["rrsp:4"], jobs=1,
                          tracking=TrackingConfig()).results
    assert len(results) == 1
    assert np.isfinite(results["objective"]).all()
    assert time.perf_counter() - start < 30 * 60


@pytest.mark.parametrize("auction", [global_auction, local_auction])
def test_converged_auctions_match_general_greedy(auction):
    rng = np.random.default_rng(2024)
    for case in range(200):
        f, m = gen_random_prob_coverage(rng, max_agents=6)
        result = auction(f, m, random_connected_graph(m.n_agents, rng))
        assert result.converged, f"instance {case} did not converge"
        assert sorted(result.selection.keys()) == sorted(general_greedy(f, m).selection.keys())


def test_partition_rounds_communicate_less_than_auctions(tmp_path):
    _experiment(tmp_path, ExperimentMode.COMMSTUDY, family=ScenarioFamily.AREA_COVERAGE,
                n_agents=list(range(10, 101, 10)), trials=50, seed=0, solver=["rrsp:4", "auction:global"])
    messages = read_csv(tmp_path / 'messages.csv')
    rrsp = messages[messages['solver'] == 'rrsp:4']
    assert (rrsp['span'] == 3).all()
    volume = messages.groupby(['n_agents', 'solver'])['volume'].mean().unstack()
    assert (volume['auction:global'] >= 5 * volume['rrsp:4']).all()


@pytest.mark.parametrize("n_d", [2, 3, 4, 6])
def test_acceptance_rate(n_d):
    stats = sync_epoch_sim(20, n_d, 60, rng=np.random.default_rng(n_d))
    assert stats.sent >= 10 ** 4
    assert abs(stats.acceptance_rate - nominal_acceptance_rate(n_d)) <= 0.02
    assert abs(stats.acceptance_rate - stats.nominal_rate) <= 3 * stats.standard_error


@settings(max_examples=1000)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_filter_mass_conservation(seed):
    rng = np.random.default_rng(seed)
    world = GridWorld(int(rng.integers(2, 10)))
    f = TargetFilter(rng.dirichlet(np.ones(world.n_cells)))
    for _ in range(3):
        f = filter_update(filter_predict(f, world), world, int(rng.integers(world.n_cells)),
                          float(rng.uniform(0, 8)))
        assert abs(f.probs.sum() - 1.0) < 1e-9


def test_weight_per_robot_levels_off(tmp_path):
    tracking = TrackingConfig(trial_length=30, burn_in=0, weight_interval=10, compute_bounds=False)
    results = _experiment(tmp_path, ExperimentMode.TRACK, family=ScenarioFamily.TRACKING,
                          n_agents=[32, 64], trials=3, seed=0, solver=["rsp:4"], tracking=tracking).results
    weights = results.groupby('n_agents')['weight_per_robot'].mean()
    assert weights[32] > 0
    assert abs(weights[64] - weights[32]) / weights[32] < 0.15
