# swarm/tracking/tracking_trial.py
"""跟踪仿真试验：规划 → 机器人移动 → 目标游走 → 测距 → 滤波更新"""
import dataclasses
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError
from swarm.models.result_model import MessageStats, TrackingStepBound, TrackingStepRecord
from swarm.netsim.comm_graph import CommGraph
from swarm.netsim.message_accounting import account_solver_messages
from swarm.redundancy.bounds import DAG_GREEDY_FAMILIES, online_bounds, posthoc_terms
from swarm.redundancy.redundancy_graph import capacity_weights
from swarm.solvers.base_solver import SolverConfig
from swarm.solvers.registry import SolverContext, parse_solver_spec, run_solver
from swarm.tracking.grid_world import GridWorld, range_mean_var
from swarm.tracking.robot_planner import plan_single_robot
from swarm.tracking.target_filter import TargetFilter, filter_predict, filter_update
from swarm.tracking.tracking_objective import TrackingNoise, TrackingObjective
from utils.logger_handler import AppLogger


# ============1. 配置管理===============

@dataclass
class TrackingConfig:
    """跟踪试验配置

    Attributes:
        horizon: 规划步数
        trial_length: 每次试验的总步数
        burn_in: 汇总时忽略的前若干步
        n_samples: 目标函数的蒙特卡洛样本数
        sparse_threshold: 稀疏滤波阈值；None 时按机器人数自动选择
        gamma: 自适应轮数策略的 γ
        weight_interval: 每隔多少步记录一次容量权重，0 表示不记录
        compute_bounds: 是否逐步记录上界；有删除边时需要容量权重，代价随机器人数平方增长
        solver: 单智能体求解的线程等配置
    """
    horizon: int = SwarmConfig.TRACKING.HORIZON
    trial_length: int = SwarmConfig.TRACKING.TRIAL_LENGTH
    burn_in: int = SwarmConfig.TRACKING.BURN_IN
    n_samples: int = SwarmConfig.TRACKING.N_SAMPLES
    sparse_threshold: Optional[float] = None
    gamma: Optional[float] = None
    weight_interval: int = 0
    compute_bounds: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.trial_length < 1:
            raise ValueError("trial_length must be at least 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.sparse_threshold is not None and self.sparse_threshold < 0:
            raise ValueError("sparse_threshold must be non-negative")
        if self.weight_interval < 0:
            raise ValueError("weight_interval must be non-negative")

    def threshold_for(self, n_robots: int) -> float:
        if self.sparse_threshold is not None:
            return self.sparse_threshold
        if n_robots >= SwarmConfig.TRACKING.SPARSE_MIN_ROBOTS:
            return SwarmConfig.TRACKING.SPARSE_THRESHOLD
        return 0.0


@dataclass(frozen=True)
class TrackingScenario:
    """一次跟踪试验的初始状态：每个机器人对应一个目标，目标初始位置已知

    Attributes:
        comm_range: 机器人通信半径（格），同时是限距规划参考其他机器人决策的距离
        target_range: 限距规划考虑的目标距离（格）
    """
    world: GridWorld
    robot_cells: Tuple[int, ...]
    target_cells: Tuple[int, ...]
    seed: int = 0
    comm_range: float = SwarmConfig.TRACKING.ROBOT_RANGE_LIMIT
    target_range: float = SwarmConfig.TRACKING.TARGET_RANGE_LIMIT

    def __post_init__(self):
        if len(self.robot_cells) != len(self.target_cells):
            raise ValueError("tracking scenarios have one target per robot")
        if not (self.comm_range > 0 and self.target_range > 0):
            raise ValueError("tracking ranges must be positive")
        for cell in self.robot_cells + self.target_cells:
            self.world.check_cell(cell)

    @property
    def n_robots(self) -> int:
        return len(self.robot_cells)

    def initial_filters(self, sparse_threshold: float = 0.0) -> List[TargetFilter]:
        return [TargetFilter.point_mass(self.world, c, sparse_threshold) for c in self.target_cells]


@dataclass
class TrackingTrialResult:
    """一次试验的逐步记录与汇总

    Attributes:
        bounds: 逐步规划上界（compute_bounds 关闭时为空）
        messages: (步, 消息统计)；通信图不连通的步不记录
    """
    records: List[TrackingStepRecord]
    summary_entropy: float
    weight_per_robot: Optional[float] = None
    underflows: int = 0
    bounds: List[TrackingStepBound] = field(default_factory=list)
    messages: List[Tuple[int, MessageStats]] = field(default_factory=list)

    @property
    def entropies(self) -> np.ndarray:
        return np.array([r.mean_entropy_bits for r in self.records])


# ============2. 仿真步骤===============

def _measure_and_update(world: GridWorld, filters: Sequence[TargetFilter], robots: Sequence[int],
                        targets: np.ndarray, env_rng: np.random.Generator) -> Tuple[List[TargetFilter], int]:
    """所有机器人测量所有目标（集中式滤波器），依次做 Bayes 更新"""
    z = env_rng.standard_normal((len(robots), len(targets)))
    updated, underflows = [], 0
    for k, f in enumerate(filters):
        f = filter_predict(f, world)
        for r, robot in enumerate(robots):
            mean, var = range_mean_var(world.distance(robot, int(targets[k])))
            f = filter_update(f, world, robot, float(mean + np.sqrt(var) * z[r, k]))
            underflows += int(f.underflowed)
        updated.append(f)
    return updated, underflows


def _step_bound(step: int, objective: TrackingObjective, matroid, result, context: SolverContext) -> TrackingStepBound:
    needs_weights = (result.psi is None and result.family in DAG_GREEDY_FAMILIES and result.converged
                     and bool(result.deleted_edges))
    posthoc, deleted = posthoc_terms(result, context.redundancy_weights() if needs_weights else None)
    online, _ = online_bounds(objective, matroid, result.selection)
    return TrackingStepBound(step=step, value=result.value, deleted_weight=deleted, posthoc=posthoc, online=online)


def run_tracking_trial(scenario: TrackingScenario, solver_spec, rng: np.random.Generator,
                       config: Optional[TrackingConfig] = None, trial: int = 0) -> TrackingTrialResult:
    """运行一次完整试验

    目标运动与测量噪声来自由 (scenario.seed, trial) 派生的环境随机流，
    与求解器无关，因此不同求解器在同一 (seed, trial) 上是配对比较。
    rng 只用于规划（噪声流与随机求解器），上界与消息统计不消耗随机数。
    """
    config = config or TrackingConfig()
    spec = parse_solver_spec(solver_spec) if isinstance(solver_spec, str) else solver_spec
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    world = scenario.world
    n = scenario.n_robots
    threshold = config.threshold_for(n)
    env_rng = np.random.default_rng([scenario.seed, trial, 2])
    solver_config = dataclasses.replace(config.solver, agent_planner=plan_single_robot)
    robot_range = spec.r_c if spec.family == "rrsp" and spec.r_c is not None else scenario.comm_range

    filters = scenario.initial_filters(threshold)
    robots = list(scenario.robot_cells)
    targets = np.array(scenario.target_cells, dtype=np.int64)
    result_log = TrackingTrialResult(records=[], summary_entropy=float('nan'))
    weight_samples: List[float] = []

    for step in range(1, config.trial_length + 1):
        noise = TrackingNoise.draw(rng, config.n_samples, n, config.horizon, n)
        objective = TrackingObjective(world, filters, robots, noise, config.horizon, threshold)
        matroid = objective.matroid()

        def weights(objective=objective, matroid=matroid):
            return capacity_weights(objective.components(), matroid, objective)

        def local_objective(robot: int, objective=objective):
            return objective.restricted_to(robot, scenario.target_range, robot_range)

        positions = world.coords[robots]
        context = SolverContext(
            objective=objective,
            matroid=matroid,
            positions=positions,
            comm_range=scenario.comm_range,
            gamma=config.gamma,
            weights=weights,
            local_objective=local_objective if spec.family == "rrsp" else None,
        )
        result = run_solver(spec, context, rng, solver_config)

        if config.weight_interval and step % config.weight_interval == 0:
            weight_samples.append(float(context.redundancy_weights().per_agent_weight().mean()))
        if config.compute_bounds:
            result_log.bounds.append(_step_bound(step, objective, matroid, result, context))
        try:
            result_log.messages.append((step, account_solver_messages(result, CommGraph(positions, robot_range))))
        except InvalidArgumentError as e:
            logger.debug(f"第 {step} 步跳过消息统计：{e}")

        decisions = result.selection.by_agent()
        robots = [world.move(robots[r], objective.sequences[decisions[r].action_id][0]) for r in range(n)]
        targets = world.move(targets, env_rng.integers(5, size=n))
        filters, step_underflows = _measure_and_update(world, filters, robots, targets, env_rng)
        result_log.underflows += step_underflows

        entropy = float(np.mean([f.entropy() for f in filters]))
        result_log.records.append(TrackingStepRecord(
            trial=trial, step=step, solver=spec.text, n_robots=n, mean_entropy_bits=entropy,
            objective=result.value, planning_evals=result.eval_count, seed=scenario.seed,
        ))
        logger.debug(f"第 {step} 步：平均目标熵 {entropy:.4f} bit，规划目标 {result.value:.4f}")

    records = result_log.records
    kept = [r.mean_entropy_bits for r in records if r.step > config.burn_in] or [r.mean_entropy_bits for r in records]
    result_log.summary_entropy = float(np.mean(kept))
    result_log.weight_per_robot = float(np.mean(weight_samples)) if weight_samples else None
    if result_log.underflows:
        logger.warning(f"试验 {trial} 中滤波器下溢 {result_log.underflows} 次")
    return result_log
