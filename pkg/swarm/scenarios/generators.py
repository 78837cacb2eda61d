# swarm/scenarios/generators.py
"""三类基准问题的带种子生成器（生成结果只取决于 n 与随机流）"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import ConfigError
from swarm.models.config_model import MixtureSpec, ScenarioConfig, ScenarioFamily
from swarm.models.selection_model import SimplePartitionMatroid
from swarm.netsim.comm_graph import CommGraph, gen_connected_positions
from swarm.objectives.coverage import (
    AreaCoverageObjective, AreaCoverageProblem, ProbCoverageObjective, ProbCoverageProblem,
)
from swarm.objectives.sensing import detection_success_prob
from swarm.redundancy.redundancy_graph import RedundancyGraph, redundancy_graph
from swarm.setfun.set_function import SetObjective
from swarm.solvers.registry import SolverContext
from swarm.tracking.grid_world import GridWorld
from swarm.tracking.tracking_trial import TrackingScenario
from utils.logger_handler import AppLogger


# ============1. 半径===============

def area_sensor_radius(n: int) -> float:
    """面积覆盖 r_s = √(2/(nπ))"""
    return math.sqrt(2.0 / (n * math.pi))


def area_action_radius(n: int) -> float:
    return 2.0 * area_sensor_radius(n)


def probsense_sensor_radius(n: int) -> float:
    """概率感知 r_s = √(0.6/(nπ))"""
    return math.sqrt(0.6 / (n * math.pi))


def probsense_action_radius(n: int) -> float:
    return 4.0 * probsense_sensor_radius(n)


# ============2. 采样工具===============

def uniform_in_disk(center: np.ndarray, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """圆盘内均匀采样，落在单位正方形外的点重抽"""
    points = np.empty((count, 2))
    filled = 0
    while filled < count:
        r = radius * np.sqrt(rng.random(count))
        theta = 2 * np.pi * rng.random(count)
        batch = center + np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        batch = batch[np.all((batch >= 0) & (batch <= 1), axis=1)]
        take = min(count - filled, len(batch))
        points[filled:filled + take] = batch[:take]
        filled += take
    return points


def sample_mixture(mixture: MixtureSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """从高斯混合采样，落在单位正方形外的点重抽"""
    means = np.asarray(mixture.means, dtype=float)
    weights = np.asarray(mixture.weights, dtype=float)
    weights = weights / weights.sum()
    points = np.empty((count, 2))
    filled = 0
    while filled < count:
        component = rng.choice(len(means), p=weights)
        point = means[component] + mixture.sigma * rng.standard_normal(2)
        if np.all(point >= 0) and np.all(point <= 1):
            points[filled] = point
            filled += 1
    return points


def _action_centers(agent_centers: np.ndarray, action_radius: float, n_actions: int,
                    rng: np.random.Generator) -> Tuple[np.ndarray, ...]:
    return tuple(uniform_in_disk(c, action_radius, n_actions, rng) for c in agent_centers)


# ============3. 覆盖类场景===============

@dataclass
class CoverageScenario:
    """面积覆盖 / 概率感知 / 通信研究的一个实例"""
    family: ScenarioFamily
    n_agents: int
    problem: Any
    objective: SetObjective
    matroid: SimplePartitionMatroid
    positions: np.ndarray
    sensor_radius: float
    action_radius: float
    comm_range: float
    gamma: Optional[float] = None
    mixture: Optional[MixtureSpec] = None
    _redundancy: Optional[RedundancyGraph] = field(default=None, init=False, repr=False)

    def redundancy(self) -> RedundancyGraph:
        if self._redundancy is None:
            self._redundancy = redundancy_graph(self.objective, self.matroid)
        return self._redundancy

    def comm_graph(self) -> CommGraph:
        return CommGraph(self.positions, self.comm_range)

    def solver_context(self, gamma: Optional[float] = None, comm_range: Optional[float] = None) -> SolverContext:
        return SolverContext(
            objective=self.objective,
            matroid=self.matroid,
            positions=self.positions,
            comm_range=comm_range if comm_range is not None else self.comm_range,
            gamma=gamma if gamma is not None else self.gamma,
            weights=self.redundancy,
        )

    def describe(self) -> Dict[str, Any]:
        info = {
            'family': self.family.value,
            'n_agents': self.n_agents,
            'sensor_radius': self.sensor_radius,
            'action_radius': self.action_radius,
            'comm_range': self.comm_range,
            'gamma': self.gamma,
        }
        if self.mixture is not None:
            info['mixture'] = self.mixture.model_dump()
        return info


def _check_overrides(overrides: Dict[str, Any], allowed: Tuple[str, ...]) -> None:
    unknown = sorted(set(overrides) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown scenario overrides: {unknown}")


AREA_OVERRIDES = ('actions_per_agent', 'grid_resolution', 'sensor_radius', 'action_radius', 'comm_range')


def gen_area_coverage(n: int, rng: np.random.Generator,
                      overrides: Optional[Dict[str, Any]] = None) -> CoverageScenario:
    """智能体中心在单位正方形内均匀；每个智能体 10 个动作在 r_a 圆盘内均匀"""
    overrides = dict(overrides or {})
    _check_overrides(overrides, AREA_OVERRIDES)
    r_s = float(overrides.get('sensor_radius', area_sensor_radius(n)))
    r_a = float(overrides.get('action_radius', 2.0 * r_s))
    n_actions = int(overrides.get('actions_per_agent', SwarmConfig.SCENARIO.ACTIONS_PER_AGENT))
    resolution = int(overrides.get('grid_resolution', SwarmConfig.OBJECTIVE.GRID_RESOLUTION))

    centers = rng.random((n, 2))
    problem = AreaCoverageProblem(_action_centers(centers, r_a, n_actions, rng), r_s, resolution, centers)
    return CoverageScenario(
        family=ScenarioFamily.AREA_COVERAGE, n_agents=n, problem=problem,
        objective=AreaCoverageObjective(problem), matroid=problem.matroid(), positions=centers,
        sensor_radius=r_s, action_radius=r_a,
        comm_range=float(overrides.get('comm_range', SwarmConfig.SCENARIO.COMM_RANGE_FACTOR * r_a)),
    )


PROBSENSE_OVERRIDES = ('actions_per_agent', 'n_events', 'mixture', 'sensor_radius', 'action_radius',
                       'comm_range', 'gamma', 'radius_power')


def gen_prob_sensing(n: int, rng: np.random.Generator,
                     overrides: Optional[Dict[str, Any]] = None) -> CoverageScenario:
    """50 个事件（各值 1/50）取自固定高斯混合；漏检概率 1 − exp(−d²/r_s⁴)"""
    overrides = dict(overrides or {})
    _check_overrides(overrides, PROBSENSE_OVERRIDES)
    r_s = float(overrides.get('sensor_radius', probsense_sensor_radius(n)))
    r_a = float(overrides.get('action_radius', 4.0 * r_s))
    n_actions = int(overrides.get('actions_per_agent', SwarmConfig.SCENARIO.ACTIONS_PER_AGENT))
    n_events = int(overrides.get('n_events', SwarmConfig.SCENARIO.N_EVENTS))
    power = float(overrides.get('radius_power', SwarmConfig.OBJECTIVE.DETECTION_RADIUS_POWER))
    mixture = MixtureSpec(**overrides['mixture']) if 'mixture' in overrides else MixtureSpec()

    events = sample_mixture(mixture, n_events, rng)
    values = np.full(n_events, 1.0 / n_events)
    centers = rng.random((n, 2))
    actions = _action_centers(centers, r_a, n_actions, rng)
    problem = ProbCoverageProblem.from_sensor_model(
        events, values, actions, lambda d: detection_success_prob(d, r_s, power))
    return CoverageScenario(
        family=ScenarioFamily.PROB_SENSING, n_agents=n, problem=problem,
        objective=ProbCoverageObjective(problem), matroid=problem.matroid(), positions=centers,
        sensor_radius=r_s, action_radius=r_a,
        comm_range=float(overrides.get('comm_range', SwarmConfig.SCENARIO.COMM_RANGE_FACTOR * r_a)),
        gamma=float(overrides.get('gamma', SwarmConfig.SCENARIO.GAMMA_NUMERATOR / n)),
        mixture=mixture,
    )


def gen_comm_study(n: int, rng: np.random.Generator,
                   overrides: Optional[Dict[str, Any]] = None) -> CoverageScenario:
    """通信研究：连通位置上的面积覆盖，r_c = 3 r_a"""
    overrides = dict(overrides or {})
    _check_overrides(overrides, AREA_OVERRIDES)
    r_s = float(overrides.get('sensor_radius', area_sensor_radius(n)))
    r_a = float(overrides.get('action_radius', 2.0 * r_s))
    r_c = float(overrides.get('comm_range', SwarmConfig.NETSIM.COMM_STUDY_RANGE_FACTOR * r_a))
    n_actions = int(overrides.get('actions_per_agent', SwarmConfig.SCENARIO.ACTIONS_PER_AGENT))
    resolution = int(overrides.get('grid_resolution', SwarmConfig.OBJECTIVE.GRID_RESOLUTION))

    positions = gen_connected_positions(n, r_c, rng)
    problem = AreaCoverageProblem(_action_centers(positions, r_a, n_actions, rng), r_s, resolution, positions)
    return CoverageScenario(
        family=ScenarioFamily.AREA_COVERAGE, n_agents=n, problem=problem,
        objective=AreaCoverageObjective(problem), matroid=problem.matroid(), positions=positions,
        sensor_radius=r_s, action_radius=r_a, comm_range=r_c,
    )


# ============4. 跟踪与小规模随机实例===============

TRACKING_OVERRIDES = ('grid_side', 'comm_range', 'target_range')


def gen_tracking(n: int, rng: np.random.Generator, seed: int = 0,
                 overrides: Optional[Dict[str, Any]] = None) -> TrackingScenario:
    """边长 round(√(12.5n)) 的网格；机器人与目标的初始格子均匀随机"""
    overrides = dict(overrides or {})
    _check_overrides(overrides, TRACKING_OVERRIDES)
    world = GridWorld(int(overrides['grid_side'])) if 'grid_side' in overrides else GridWorld.for_robots(n)
    robots = tuple(int(c) for c in rng.integers(world.n_cells, size=n))
    targets = tuple(int(c) for c in rng.integers(world.n_cells, size=n))
    return TrackingScenario(
        world, robots, targets, seed,
        comm_range=float(overrides.get('comm_range', SwarmConfig.TRACKING.ROBOT_RANGE_LIMIT)),
        target_range=float(overrides.get('target_range', SwarmConfig.TRACKING.TARGET_RANGE_LIMIT)),
    )


def gen_random_prob_coverage(rng: np.random.Generator, max_agents: int = 4, max_actions: int = 4,
                             max_events: int = 6) -> Tuple[ProbCoverageObjective, SimplePartitionMatroid]:
    """小规模随机概率覆盖实例，用于穷举核对"""
    n_agents = int(rng.integers(1, max_agents + 1))
    n_events = int(rng.integers(1, max_events + 1))
    values = rng.random(n_events)
    failure = []
    for _ in range(n_agents):
        n_actions = int(rng.integers(1, max_actions + 1))
        matrix = rng.random((n_actions, n_events))
        # 一部分动作完全看不到某些事件，制造稀疏的重叠结构
        matrix[rng.random((n_actions, n_events)) < 0.3] = 1.0
        failure.append(matrix)
    problem = ProbCoverageProblem(rng.random((n_events, 2)), values, tuple(failure))
    return ProbCoverageObjective(problem), problem.matroid()


def generate_scenario(config: ScenarioConfig, rng: np.random.Generator):
    """按问题族分派生成器"""
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    if config.family == ScenarioFamily.AREA_COVERAGE:
        scenario = gen_area_coverage(config.n_agents, rng, config.overrides)
    elif config.family == ScenarioFamily.PROB_SENSING:
        scenario = gen_prob_sensing(config.n_agents, rng, config.overrides)
    elif config.family == ScenarioFamily.TRACKING:
        scenario = gen_tracking(config.n_agents, rng, config.seed, config.overrides)
    else:
        raise ConfigError(f"unknown scenario family {config.family}")
    logger.debug(f"生成场景 {config.family.value}，n={config.n_agents}")
    return scenario
