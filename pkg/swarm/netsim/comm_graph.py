# swarm/netsim/comm_graph.py
from functools import cached_property
from typing import List, Optional

import networkx as nx
import numpy as np

from swarm.exceptions import InvalidArgumentError


class CommGraph:
    """几何通信图：距离不超过 r_c 的智能体之间有无向边

    最短路按跳数（广度优先）计算；positions 为空时表示完全图。
    """

    def __init__(self, positions: Optional[np.ndarray], r_c: float, n_agents: Optional[int] = None):
        if positions is None:
            if n_agents is None:
                raise InvalidArgumentError("need positions or an agent count")
            self.positions = None
            self.r_c = float(r_c)
            self.graph = nx.complete_graph(n_agents)
            return
        if not r_c > 0:
            raise InvalidArgumentError(f"communication range must be positive, got {r_c}")
        self.positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.r_c = float(r_c)
        distance = np.linalg.norm(self.positions[:, None, :] - self.positions[None, :, :], axis=2)
        adjacency = (distance <= self.r_c).astype(int)
        np.fill_diagonal(adjacency, 0)
        self.graph = nx.from_numpy_array(adjacency)

    @classmethod
    def complete(cls, n_agents: int) -> 'CommGraph':
        return cls(None, np.inf, n_agents=n_agents)

    @classmethod
    def from_graph(cls, graph: nx.Graph) -> 'CommGraph':
        instance = cls.complete(graph.number_of_nodes())
        instance.graph = graph
        return instance

    @property
    def n_agents(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n_edges(self) -> int:
        return self.graph.number_of_edges()

    def neighbors(self, agent: int) -> List[int]:
        return sorted(int(j) for j in self.graph.neighbors(agent))

    def is_connected(self) -> bool:
        return self.n_agents <= 1 or nx.is_connected(self.graph)

    def diameter(self) -> float:
        if self.n_agents <= 1:
            return 0
        return nx.diameter(self.graph) if self.is_connected() else np.inf

    @cached_property
    def hop_matrix(self) -> np.ndarray:
        """两两跳数，不可达为 inf"""
        n = self.n_agents
        hops = np.full((n, n), np.inf)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, length in lengths.items():
                hops[source, target] = length
        return hops

    def hops(self, i: int, j: int) -> int:
        value = self.hop_matrix[i, j]
        if not np.isfinite(value):
            raise InvalidArgumentError(f"agents {i} and {j} are not connected")
        return int(value)


def gen_connected_positions(n: int, r_c: float, rng: np.random.Generator) -> np.ndarray:
    """逐个生成连通的智能体位置

    第一个位置在单位正方形内均匀；之后每个位置在随机选取的已有智能体的 r_c 圆盘内均匀，
    落在单位正方形外则重抽。
    """
    if n < 1:
        raise InvalidArgumentError("need at least one agent")
    if not r_c > 0:
        raise InvalidArgumentError(f"communication range must be positive, got {r_c}")
    positions = np.empty((n, 2))
    positions[0] = rng.random(2)
    for k in range(1, n):
        anchor = positions[rng.integers(k)]
        while True:
            radius = r_c * np.sqrt(rng.random())
            angle = 2 * np.pi * rng.random()
            point = anchor + radius * np.array([np.cos(angle), np.sin(angle)])
            if np.all(point >= 0) and np.all(point <= 1):
                break
        positions[k] = point
    return positions
