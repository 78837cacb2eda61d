# swarm/redundancy/redundancy_graph.py
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from utils.logger_handler import AppLogger


# ============1. 冗余图===============

@dataclass(frozen=True, eq=False)
class RedundancyGraph:
    """智能体间冗余权重 w_ij：对称、非负、对角为零"""
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidArgumentError(f"weight matrix must be square, got shape {w.shape}")
        if np.any(w < 0):
            raise InvalidArgumentError("redundancy weights must be non-negative")
        if not np.allclose(w, w.T, rtol=0, atol=1e-12):
            raise InvalidArgumentError("redundancy weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise InvalidArgumentError("redundancy graph has a non-zero diagonal")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, 'weights', w)

    @property
    def n_agents(self) -> int:
        return int(self.weights.shape[0])

    def weight(self, i: int, j: int) -> float:
        return float(self.weights[i, j])

    @property
    def total_weight(self) -> float:
        """Σ_{i<j} w_ij"""
        return float(np.triu(self.weights, k=1).sum())

    def per_agent_weight(self) -> np.ndarray:
        """每个智能体的累积冗余 Σ_j w_ij"""
        return self.weights.sum(axis=1)


# ============2. 成对冗余===============

def pairwise_weight(f: SetObjective, block_i: Sequence[GroundElement], block_j: Sequence[GroundElement]) -> float:
    """w_ij = max_{x_i, x_j} −f(x_i; x_j)，负的数值噪声截断为 0

    −f(x_i; x_j) = f(x_j) − f(x_j | x_i)，按 x_i 批量计算。
    """
    block_i, block_j = list(block_i), list(block_j)
    if not block_i or not block_j:
        return 0.0
    agents_i = {x.agent_id for x in block_i}
    if agents_i & {x.agent_id for x in block_j}:
        raise InvalidArgumentError("pairwise weight needs blocks of two distinct agents")
    singles = f.singleton_values(block_j)
    best = 0.0
    for x in block_i:
        conditioned = f.marginal_gains(block_j, Selection((x,)))
        best = max(best, float(np.max(singles - conditioned)))
    return max(best, 0.0)


def redundancy_graph(f: SetObjective, m: SimplePartitionMatroid, max_workers: int = 1) -> RedundancyGraph:
    """对所有智能体对计算 w_ij；may_interact 为假的对直接记 0"""
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    n = m.n_agents
    blocks = [m.block(i) for i in range(n)]
    pairs = [(i, j) for i, j in combinations(range(n), 2) if f.may_interact(i, j)]

    def weigh(pair: Tuple[int, int]) -> float:
        return pairwise_weight(f, blocks[pair[0]], blocks[pair[1]])

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            values = list(executor.map(weigh, pairs))
    else:
        values = [weigh(p) for p in pairs]

    weights = np.zeros((n, n))
    for (i, j), w in zip(pairs, values):
        weights[i, j] = weights[j, i] = w
    logger.debug(f"冗余图：{n} 个智能体，{len(pairs)} 对可能相互影响")
    return RedundancyGraph(weights)


# ============3. 求和分解的信道容量权重===============

def capacity_matrix(per_target_objectives: Sequence[SetObjective], m: SimplePartitionMatroid) -> np.ndarray:
    """C_ik = max_{x∈B_i} f_k({x})，形状 (智能体数, 分量数)"""
    n = m.n_agents
    capacities = np.zeros((n, len(per_target_objectives)))
    for i in range(n):
        block = m.block(i)
        for k, component in enumerate(per_target_objectives):
            capacities[i, k] = max(0.0, float(np.max(component.singleton_values(block))))
    return capacities


def _decomposition_samples(m: SimplePartitionMatroid) -> List[Selection]:
    first_actions = [m.element(i, 0) for i in range(m.n_agents)]
    last_actions = [m.element(i, m.blocks[i] - 1) for i in range(m.n_agents)]
    samples = [Selection((x,)) for x in first_actions]
    samples.append(Selection(tuple(first_actions)))
    samples.append(Selection(tuple(last_actions)))
    return samples


def check_sum_decomposition(per_target_objectives: Sequence[SetObjective], objective: SetObjective,
                            m: SimplePartitionMatroid, tol: float = 1e-9) -> None:
    """在探测集合上核对 Σ_k f_k = f，不一致抛 InvalidArgumentError"""
    for sample in _decomposition_samples(m):
        total = sum(c.evaluate(sample) for c in per_target_objectives)
        value = objective.evaluate(sample)
        if abs(total - value) > tol * max(1.0, abs(value)):
            raise InvalidArgumentError(
                f"components do not decompose the objective: sum {total} != {value} on {sample.keys()}")


def capacity_weights(per_target_objectives: Sequence[SetObjective], m: SimplePartitionMatroid,
                     objective: Optional[SetObjective] = None) -> RedundancyGraph:
    """Ŵ(i,j) = Σ_k min(C_ik, C_jk)；给出 objective 时先核对求和分解"""
    if objective is not None:
        check_sum_decomposition(per_target_objectives, objective, m)
    capacities = capacity_matrix(per_target_objectives, m)
    weights = np.minimum(capacities[:, None, :], capacities[None, :, :]).sum(axis=2)
    np.fill_diagonal(weights, 0.0)
    return RedundancyGraph(weights)
