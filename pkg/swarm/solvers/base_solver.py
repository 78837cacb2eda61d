# swarm/solvers/base_solver.py
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError, InvalidProblemError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective, best_index


# ============1. 配置管理===============

@dataclass
class SolverConfig:
    """求解器通用配置

    Attributes:
        max_workers: 同一 DAG 层内并行计算单智能体最优动作的线程数，1 表示串行
        tie_tolerance: 目标值平局容差
        enumeration_cap: 穷举上限
        agent_planner: DAG 贪心中单智能体求最优动作的函数，签名同 block_argmax；None 时用 block_argmax
    """
    max_workers: int = SwarmConfig.SOLVER.MAX_WORKERS
    tie_tolerance: float = SwarmConfig.SOLVER.TIE_TOLERANCE
    enumeration_cap: int = SwarmConfig.SOLVER.ENUMERATION_CAP
    agent_planner: Optional[Callable[..., Tuple[GroundElement, float]]] = None

    def __post_init__(self):
        if self.max_workers < 1:
            raise ValueError("max_workers must be at least 1")
        if self.tie_tolerance < 0:
            raise ValueError("tie_tolerance must be non-negative")
        if self.enumeration_cap < 1:
            raise ValueError("enumeration_cap must be positive")


# ============2. 规划DAG===============

@dataclass(frozen=True)
class PlannerDag:
    """每个智能体的入邻居集合 N_i（只含更早决策的智能体）

    Attributes:
        in_neighbors: in_neighbors[i] 为智能体 i 决策时参考的智能体
        agent_order: 与 DAG 一致的决策全序
    """
    in_neighbors: Tuple[FrozenSet[int], ...]
    agent_order: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.in_neighbors)
        if sorted(self.agent_order) != list(range(n)):
            raise InvalidArgumentError("agent_order must be a permutation of all agents")
        position = {agent: k for k, agent in enumerate(self.agent_order)}
        for agent, neighbors in enumerate(self.in_neighbors):
            for j in neighbors:
                if j not in position or position[j] >= position[agent]:
                    raise InvalidArgumentError(f"dag edge {j}->{agent} is not consistent with an acyclic order")

    @classmethod
    def from_neighbors(cls, in_neighbors: Sequence[Sequence[int]], agent_order: Optional[Sequence[int]] = None) -> 'PlannerDag':
        """由入邻居构造；未给出顺序时做拓扑排序（同层按 agent_id 升序），有环则报错"""
        neighbors = tuple(frozenset(int(j) for j in ns) for ns in in_neighbors)
        if agent_order is None:
            agent_order = _topological_order(neighbors)
        return cls(neighbors, tuple(int(a) for a in agent_order))

    @classmethod
    def complete(cls, order: Sequence[int]) -> 'PlannerDag':
        order = tuple(int(a) for a in order)
        neighbors: List[FrozenSet[int]] = [frozenset()] * len(order)
        for k, agent in enumerate(order):
            neighbors[agent] = frozenset(order[:k])
        return cls(tuple(neighbors), order)

    @classmethod
    def empty(cls, n_agents: int) -> 'PlannerDag':
        return cls(tuple(frozenset() for _ in range(n_agents)), tuple(range(n_agents)))

    @property
    def n_agents(self) -> int:
        return len(self.in_neighbors)

    def earlier(self, agent: int) -> Tuple[int, ...]:
        k = self.agent_order.index(agent)
        return self.agent_order[:k]

    def ignored(self, agent: int) -> FrozenSet[int]:
        """N̂_i：更早决策但被忽略的智能体"""
        return frozenset(self.earlier(agent)) - self.in_neighbors[agent]

    def deleted_edges(self) -> List[Tuple[int, int]]:
        return [(agent, j) for agent in self.agent_order for j in sorted(self.ignored(agent))]

    def levels(self) -> List[List[int]]:
        """按依赖深度分层；同层智能体互不依赖，可并行求解"""
        depth: Dict[int, int] = {}
        for agent in self.agent_order:
            depth[agent] = 1 + max((depth[j] for j in self.in_neighbors[agent]), default=-1)
        layered: Dict[int, List[int]] = {}
        for agent in self.agent_order:
            layered.setdefault(depth[agent], []).append(agent)
        return [layered[d] for d in sorted(layered)]


def _topological_order(neighbors: Tuple[FrozenSet[int], ...]) -> List[int]:
    n = len(neighbors)
    remaining = set(range(n))
    done: List[int] = []
    placed = set()
    while remaining:
        ready = sorted(a for a in remaining if neighbors[a] <= placed)
        if not ready:
            raise InvalidArgumentError("planner dag contains a cycle")
        for agent in ready:
            done.append(agent)
            placed.add(agent)
            remaining.discard(agent)
    return done


# ============3. 求解结果===============

@dataclass
class SolveResult:
    """求解结果

    per_agent_gain 与 selection 同序，是决策时刻计算的边际增益；
    value 为 f(selection)（随机目标时为同一噪声流下的估计）。
    """
    selection: Selection
    value: float
    per_agent_gain: List[float]
    rounds_used: int = 1
    psi: Optional[float] = None
    dag: Optional[PlannerDag] = None
    round_of_agent: Optional[List[int]] = None
    converged: bool = True
    family: str = "sequential"
    eval_count: int = 0
    trace: Dict[str, Any] = field(default_factory=dict)

    @property
    def deleted_edges(self) -> List[Tuple[int, int]]:
        return self.dag.deleted_edges() if self.dag is not None else []

    def action_of(self, agent: int) -> Optional[GroundElement]:
        return self.selection.by_agent().get(agent)


# ============4. 单智能体最优动作===============

def check_blocks(m: SimplePartitionMatroid) -> None:
    empty = [i for i, size in enumerate(m.blocks) if size < 1]
    if empty:
        raise InvalidProblemError(f"empty action block for agents {empty}")


def block_argmax(f: SetObjective, m: SimplePartitionMatroid, agent: int, base: Selection,
                 tie_tolerance: float = SwarmConfig.SOLVER.TIE_TOLERANCE) -> Tuple[GroundElement, float]:
    """智能体在自己动作块上的最大边际增益动作，平局取最小 action_id"""
    candidates = m.block(agent)
    gains = f.marginal_gains(candidates, base)
    k = best_index(gains, tie_tolerance)
    return candidates[k], float(gains[k])


LocalObjective = Callable[[int], SetObjective]


def dag_greedy(f: SetObjective, m: SimplePartitionMatroid, dag: PlannerDag,
               config: Optional[SolverConfig] = None,
               local_objective: Optional[LocalObjective] = None,
               family: str = "dag") -> SolveResult:
    """DAG 约束贪心：智能体 i 只在 N_i 的决策条件下最大化边际增益

    同一层的智能体互不依赖，max_workers > 1 时并行计算；提交在层边界串行完成。
    local_objective(i) 可为每个智能体提供近似的本地目标 f̃_i。
    """
    config = config or SolverConfig()
    check_blocks(m)
    if dag.n_agents != m.n_agents:
        raise InvalidArgumentError(f"dag covers {dag.n_agents} agents, matroid has {m.n_agents}")

    decisions: Dict[int, GroundElement] = {}
    gains: Dict[int, float] = {}
    position = {agent: k for k, agent in enumerate(dag.agent_order)}
    argmax = config.agent_planner or block_argmax

    def plan(agent: int) -> Tuple[GroundElement, float]:
        base = Selection(tuple(decisions[j] for j in sorted(dag.in_neighbors[agent], key=position.get)))
        objective = local_objective(agent) if local_objective is not None else f
        return argmax(objective, m, agent, base, config.tie_tolerance)

    levels = dag.levels()
    if config.max_workers > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as executor:
            for level in levels:
                for agent, (x, gain) in zip(level, executor.map(plan, level)):
                    decisions[agent], gains[agent] = x, gain
    else:
        for level in levels:
            planned = [plan(agent) for agent in level]
            for agent, (x, gain) in zip(level, planned):
                decisions[agent], gains[agent] = x, gain

    selection = Selection(tuple(decisions[a] for a in dag.agent_order))
    return SolveResult(
        selection=selection,
        value=f.evaluate(selection),
        per_agent_gain=[gains[a] for a in dag.agent_order],
        rounds_used=len(levels),
        dag=dag,
        family=family,
    )
