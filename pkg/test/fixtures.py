# test/fixtures.py
"""测试共用的小实例

两智能体加权覆盖：物品 e1（价值 2）、e2（价值 1）；
智能体 a、b 各有两个动作，动作 1 覆盖 e1，动作 2 覆盖 e2。
"""
from typing import Tuple

import networkx as nx
import numpy as np

from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.objectives.coverage import ProbCoverageObjective, weighted_coverage
from swarm.scenarios.generators import gen_random_prob_coverage

ABS_TOL = 1e-9


def two_agent_coverage() -> Tuple[ProbCoverageObjective, SimplePartitionMatroid]:
    return weighted_coverage([2.0, 1.0], [[[0], [1]], [[0], [1]]])


def two_agent_elements(m: SimplePartitionMatroid) -> Tuple[GroundElement, GroundElement, GroundElement, GroundElement]:
    """(a1, a2, b1, b2)"""
    return m.element(0, 0), m.element(0, 1), m.element(1, 0), m.element(1, 1)


def selection_of(*elements: GroundElement) -> Selection:
    return Selection(tuple(elements))


def small_instance(seed: int, max_agents: int = 4, max_actions: int = 4, max_events: int = 6):
    return gen_random_prob_coverage(np.random.default_rng(seed), max_agents, max_actions, max_events)


def random_connected_graph(n: int, rng: np.random.Generator, p: float = 0.5) -> nx.Graph:
    """随机连通图：随机生成树再按概率 p 加边"""
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for k in range(1, n):
        graph.add_edge(k, int(rng.integers(k)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                graph.add_edge(i, j)
    return graph
