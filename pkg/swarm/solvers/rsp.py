# swarm/solvers/rsp.py
"""随机顺序划分（RSP）与限距 RSP

智能体独立均匀地抽取规划轮次 d_i；同轮智能体互相忽略，只参考更早轮次的决策。
限距版本进一步只参考通信半径 r_c 内的智能体。
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from swarm.solvers.base_solver import LocalObjective, PlannerDag, SolveResult, SolverConfig, dag_greedy


class RoundVariant(str, Enum):
    """轮数策略"""
    FIXED = "fixed"
    GLOBAL_ADAPTIVE = "global_adaptive"
    LOCAL_ADAPTIVE = "local_adaptive"


@dataclass(frozen=True)
class RoundPolicy:
    """轮数策略：固定 n_d，或按冗余权重与目标冗余 γ 自适应"""
    variant: RoundVariant
    n_d: Optional[int] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.variant == RoundVariant.FIXED:
            if self.n_d is None or self.n_d < 1:
                raise InvalidArgumentError(f"fixed policy needs n_d >= 1, got {self.n_d}")
        elif self.gamma is None or not self.gamma > 0:
            raise InvalidArgumentError(f"adaptive policy needs gamma > 0, got {self.gamma}")

    @classmethod
    def fixed(cls, n_d: int) -> 'RoundPolicy':
        return cls(RoundVariant.FIXED, n_d=n_d)

    @classmethod
    def global_adaptive(cls, gamma: float) -> 'RoundPolicy':
        return cls(RoundVariant.GLOBAL_ADAPTIVE, gamma=gamma)

    @classmethod
    def local_adaptive(cls, gamma: float) -> 'RoundPolicy':
        return cls(RoundVariant.LOCAL_ADAPTIVE, gamma=gamma)

    @property
    def is_adaptive(self) -> bool:
        return self.variant != RoundVariant.FIXED


# 权重矩阵，或带 weights 属性的冗余图
WeightsLike = Union[np.ndarray, Any]


def _weight_matrix(weights: Optional[WeightsLike], n_agents: int) -> np.ndarray:
    if weights is None:
        raise InvalidArgumentError("adaptive round policies need redundancy weights")
    matrix = np.asarray(getattr(weights, 'weights', weights), dtype=float)
    if matrix.shape != (n_agents, n_agents):
        raise InvalidArgumentError(f"weight matrix shape {matrix.shape} does not match {n_agents} agents")
    return matrix


def round_counts(n_agents: int, policy: RoundPolicy, weights: Optional[WeightsLike] = None) -> np.ndarray:
    """每个智能体的轮数上限 k_i"""
    if policy.variant == RoundVariant.FIXED:
        return np.full(n_agents, policy.n_d, dtype=np.int64)

    matrix = _weight_matrix(weights, n_agents)
    if policy.variant == RoundVariant.GLOBAL_ADAPTIVE:
        total = float(np.triu(matrix, k=1).sum())
        n_d = max(1, math.ceil(total / (n_agents * policy.gamma)))
        return np.full(n_agents, n_d, dtype=np.int64)

    per_agent = matrix.sum(axis=1)
    return np.maximum(1, np.ceil(per_agent / (2.0 * policy.gamma))).astype(np.int64)


def rsp_assign_rounds(n_agents: int, policy: RoundPolicy, weights: Optional[WeightsLike],
                      rng: np.random.Generator) -> Tuple[List[int], int]:
    """抽取每个智能体的轮次 d_i ~ Uniform{1..k_i}，返回 (轮次列表, n_d)"""
    if n_agents < 1:
        raise InvalidArgumentError("need at least one agent")
    counts = round_counts(n_agents, policy, weights)
    rounds = rng.integers(1, counts + 1)
    return [int(r) for r in rounds], int(counts.max())


def rsp_dag(round_of_agent: Sequence[int],
            positions: Optional[np.ndarray] = None,
            r_c: Optional[float] = None) -> PlannerDag:
    """按轮次构造 DAG：N_i = 更早轮次的智能体（可再与 r_c 邻域求交）

    决策顺序为轮次升序、同轮内 agent_id 升序。
    """
    rounds = np.asarray(round_of_agent)
    n = rounds.shape[0]
    order = sorted(range(n), key=lambda a: (rounds[a], a))
    in_range = None
    if r_c is not None:
        pts = np.asarray(positions, dtype=float)
        distance = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        in_range = distance <= r_c
    neighbors = []
    for agent in range(n):
        earlier = np.flatnonzero(rounds < rounds[agent])
        if in_range is not None:
            earlier = earlier[in_range[agent, earlier]]
        neighbors.append(frozenset(int(j) for j in earlier))
    return PlannerDag(tuple(neighbors), tuple(order))


def rsp_plan(f: SetObjective, m: SimplePartitionMatroid, policy: RoundPolicy, rng: np.random.Generator,
             weights: Optional[WeightsLike] = None,
             config: Optional[SolverConfig] = None) -> SolveResult:
    """RSP：抽轮次 → 构造 DAG → DAG 贪心；同轮智能体可并行"""
    round_of_agent, n_d = rsp_assign_rounds(m.n_agents, policy, weights, rng)
    result = dag_greedy(f, m, rsp_dag(round_of_agent), config, family="rsp")
    result.rounds_used = n_d
    result.round_of_agent = round_of_agent
    return result


def rrsp_plan(f: SetObjective, m: SimplePartitionMatroid, policy: RoundPolicy,
              positions: np.ndarray, r_c: float, rng: np.random.Generator,
              weights: Optional[WeightsLike] = None,
              config: Optional[SolverConfig] = None,
              local_objective: Optional[LocalObjective] = None) -> SolveResult:
    """限距 RSP：在 RSP 的入邻居基础上只保留距离 ≤ r_c 的智能体"""
    if not r_c > 0:
        raise InvalidArgumentError(f"communication range must be positive, got {r_c}")
    positions = np.asarray(positions, dtype=float)
    if positions.shape[0] != m.n_agents:
        raise InvalidArgumentError("need one position per agent")
    round_of_agent, n_d = rsp_assign_rounds(m.n_agents, policy, weights, rng)
    dag = rsp_dag(round_of_agent, positions, r_c)
    result = dag_greedy(f, m, dag, config, local_objective=local_objective, family="rrsp")
    result.rounds_used = n_d
    result.round_of_agent = round_of_agent
    result.trace['r_c'] = r_c
    return result
