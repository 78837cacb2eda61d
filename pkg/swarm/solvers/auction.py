# swarm/solvers/auction.py
"""同步拍卖基线

两种拍卖都在无向通信图上按同步轮次运行，收敛时等价于一般贪心：
- 全局信息拍卖：智能体在“自身动作块 ∪ 自己与邻居的当前分配”上直接运行一般贪心；
- 本地信息拍卖：交换按分配顺序排列的 (分配, 增益) 列表，智能体只评估自己的动作。
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from config import SwarmConfig
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from swarm.solvers.base_solver import PlannerDag, SolveResult, SolverConfig, block_argmax, check_blocks
from swarm.solvers.greedy import greedy_over
from utils.logger_handler import AppLogger


def _as_graph(comm_graph) -> nx.Graph:
    # nx.Graph 自带 .graph 属性字典，必须先判断
    if isinstance(comm_graph, nx.Graph):
        return comm_graph
    graph = getattr(comm_graph, 'graph', None)
    if not isinstance(graph, nx.Graph):
        raise TypeError("comm_graph must be a networkx graph or expose one as .graph")
    return graph


def _neighbors(graph: nx.Graph, n_agents: int) -> List[List[int]]:
    return [sorted(int(j) for j in graph.neighbors(i)) if i in graph else [] for i in range(n_agents)]


def _default_rounds(n_agents: int, max_rounds: Optional[int]) -> int:
    return max_rounds if max_rounds is not None else SwarmConfig.SOLVER.AUCTION_ROUND_FACTOR * n_agents


def _finish(f: SetObjective, candidates: Sequence[Selection], gains: Sequence[List[float]],
            converged: bool, rounds: int, list_lengths: List[List[int]], family: str) -> SolveResult:
    """收敛时取共同结果，否则取目标值最高的列表（平局取编号小的智能体）"""
    values = [f.evaluate(s) for s in candidates]
    if converged:
        best = 0
    else:
        top = max(values)
        best = min(i for i, v in enumerate(values) if v >= top - SwarmConfig.SOLVER.TIE_TOLERANCE)
    selection = candidates[best]
    return SolveResult(
        selection=selection,
        value=values[best],
        per_agent_gain=list(gains[best]),
        rounds_used=rounds,
        dag=PlannerDag.complete(selection.agents()) if len(selection) == len(candidates) else None,
        converged=converged,
        family=family,
        trace={'list_lengths': list_lengths},
    )


# ============1. 全局信息拍卖===============

def global_auction(f: SetObjective, m: SimplePartitionMatroid, comm_graph,
                   max_rounds: Optional[int] = None,
                   config: Optional[SolverConfig] = None) -> SolveResult:
    """全局信息拍卖

    每轮：向邻居发送当前分配；在 B_i ∪ 自己与邻居的分配 上运行一般贪心得到新分配。
    所有智能体持有相同且完整的分配时收敛；超过 max_rounds 返回目前最好的分配并标记未收敛。
    """
    config = config or SolverConfig()
    check_blocks(m)
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    n = m.n_agents
    graph = _as_graph(comm_graph)
    neighbors = _neighbors(graph, n)
    limit = _default_rounds(n, max_rounds)

    assignments: List[Selection] = [Selection() for _ in range(n)]
    gains: List[List[float]] = [[] for _ in range(n)]
    list_lengths: List[List[int]] = []
    converged, rounds = False, 0

    while rounds < limit:
        snapshot = list(assignments)
        list_lengths.append([len(s) for s in snapshot])
        for i in range(n):
            ground: Dict[int, set] = {i: set(m.block(i))}
            for j in [i] + neighbors[i]:
                for x in snapshot[j]:
                    ground.setdefault(x.agent_id, set()).add(x)
            assignments[i], gains[i] = greedy_over(f, {a: sorted(xs) for a, xs in ground.items()},
                                                   config.tie_tolerance)
        rounds += 1
        first = assignments[0].keys()
        if len(first) == n and all(s.keys() == first for s in assignments):
            converged = True
            break

    if not converged:
        logger.warning(f"全局信息拍卖在 {rounds} 轮内未收敛")
    return _finish(f, assignments, gains, converged, rounds, list_lengths, "auction")


# ============2. 本地信息拍卖===============

Bid = Optional[Tuple[GroundElement, float]]


@dataclass
class _BidList:
    """按分配顺序排列的元素与对应的边际增益"""
    elements: List[GroundElement]
    values: List[float]

    def bid(self, position: int) -> Bid:
        if position < len(self.elements):
            return self.elements[position], self.values[position]
        return None

    def copy(self) -> '_BidList':
        return _BidList(list(self.elements), list(self.values))

    def has_agent(self, agent: int) -> bool:
        return any(x.agent_id == agent for x in self.elements)


def _beats(a: Bid, b: Bid, tol: float) -> bool:
    """出价 a 是否严格优于 b：先比增益，容差内平局时 (agent_id, action_id) 小者胜；空出价最低"""
    if a is None:
        return False
    if b is None:
        return True
    (xa, va), (xb, vb) = a, b
    if va > vb + tol:
        return True
    if vb > va + tol:
        return False
    return xa.key < xb.key


def _same_bid(a: Bid, b: Bid, tol: float) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a[0].key == b[0].key and abs(a[1] - b[1]) <= tol


def _insert_own_bid(f: SetObjective, m: SimplePartitionMatroid, agent: int, other: _BidList,
                    start: int, tol: float) -> _BidList:
    """从 start 位置起寻找自己的出价能胜出的第一个位置，插入并截断其后的分配"""
    for position in range(start, len(other.elements) + 1):
        prefix = Selection(tuple(other.elements[:position]))
        x, v = block_argmax(f, m, agent, prefix, tol)
        if _beats((x, v), other.bid(position), tol):
            return _BidList(other.elements[:position] + [x], other.values[:position] + [v])
    # 末尾对应空出价，循环必在此前返回
    raise AssertionError("bid search ran past the null position")


def _update_assignments(f: SetObjective, m: SimplePartitionMatroid, agent: int,
                        local: _BidList, other: _BidList, tol: float) -> _BidList:
    length = max(len(local.elements), len(other.elements))
    diff = next((k for k in range(length) if not _same_bid(local.bid(k), other.bid(k), tol)), None)
    if diff is None:
        return local
    if not _beats(other.bid(diff), local.bid(diff), tol):
        return local
    if other.has_agent(agent):
        return other.copy()
    return _insert_own_bid(f, m, agent, other, diff, tol)


def local_auction(f: SetObjective, m: SimplePartitionMatroid, comm_graph,
                  max_rounds: Optional[int] = None,
                  config: Optional[SolverConfig] = None) -> SolveResult:
    """本地信息拍卖

    每轮：向邻居发送 (分配列表, 增益列表)；按邻居编号依次合并。合并规则：
    找到第一个不同的位置（空位视为最低出价）；本地列表在该处占优则保留；
    否则若对方列表已含本智能体的分配则采用对方列表；
    否则采用对方列表，并从该位置起寻找自己的出价能胜出的第一个位置插入，截断其后分配。
    合并后仍没有自己分配的智能体从第一个位置起同样寻找插入位置。
    """
    config = config or SolverConfig()
    check_blocks(m)
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    tol = config.tie_tolerance
    n = m.n_agents
    graph = _as_graph(comm_graph)
    neighbors = _neighbors(graph, n)
    limit = _default_rounds(n, max_rounds)

    lists = [_BidList([], []) for _ in range(n)]
    list_lengths: List[List[int]] = []
    converged, rounds = False, 0

    while rounds < limit:
        snapshot = [b.copy() for b in lists]
        list_lengths.append([len(b.elements) for b in snapshot])
        for i in range(n):
            current = snapshot[i]
            for j in neighbors[i]:
                current = _update_assignments(f, m, i, current, snapshot[j], tol)
            if not current.has_agent(i):
                current = _insert_own_bid(f, m, i, current, 0, tol)
            lists[i] = current
        rounds += 1
        first = [x.key for x in lists[0].elements]
        if len(first) == n and all([x.key for x in b.elements] == first for b in lists):
            converged = True
            break

    if not converged:
        logger.warning(f"本地信息拍卖在 {rounds} 轮内未收敛")
    selections = [Selection(tuple(b.elements)) for b in lists]
    return _finish(f, selections, [b.values for b in lists], converged, rounds, list_lengths, "auction")
