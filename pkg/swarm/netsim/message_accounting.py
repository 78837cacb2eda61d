# swarm/netsim/message_accounting.py
"""按求解器族统计通信开销

消息数按跳计；通信量为 决策数 × 跳数；span 为所需的最长顺序传输链。
"""
from typing import Dict, List

import numpy as np

from swarm.exceptions import InvalidArgumentError
from swarm.models.result_model import MessageStats
from swarm.netsim.comm_graph import CommGraph
from swarm.solvers.base_solver import SolveResult


def _sequential_chain(result: SolveResult, graph: CommGraph) -> MessageStats:
    """按规划顺序在相邻规划者之间传递累积的决策"""
    order = result.selection.agents()
    messages = volume = 0
    for k in range(len(order) - 1):
        hops = graph.hops(order[k], order[k + 1])
        messages += hops
        volume += (k + 1) * hops
    return MessageStats(messages=messages, volume=volume, span=messages, rounds=result.rounds_used)


def _partition_rounds(result: SolveResult, graph: CommGraph) -> MessageStats:
    """RSP / RRSP：每个决策只发给参考它的后续轮次智能体"""
    dag = result.dag
    rounds = result.round_of_agent
    if dag is None or rounds is None:
        raise InvalidArgumentError("partition planner trace needs a dag and round assignment")
    n_d = result.rounds_used
    messages = 0
    longest: Dict[int, int] = {}
    for receiver, senders in enumerate(dag.in_neighbors):
        for sender in senders:
            hops = graph.hops(sender, receiver)
            messages += hops
            longest[rounds[sender]] = max(longest.get(rounds[sender], 0), hops)
    # 每个非末轮都占用一次同步传输，末轮决策无人接收
    span = sum(max(1, longest.get(r, 0)) for r in range(1, n_d))
    broadcast = sum(graph.graph.degree(i) for i in range(graph.n_agents))
    return MessageStats(messages=messages, volume=messages, span=span,
                        broadcast_messages=broadcast, rounds=n_d)


def _dsga_commits(result: SolveResult, graph: CommGraph) -> MessageStats:
    """DSGA：每次提交路由到所有尚未分配的智能体"""
    order = [c.agent for c in result.trace.get('commits', [])]
    if not order:
        order = result.selection.agents()
    messages = span = 0
    for k, agent in enumerate(order):
        hops = [graph.hops(agent, other) for other in order[k + 1:]]
        messages += sum(hops)
        span += max(hops, default=0)
    return MessageStats(messages=messages, volume=messages, span=span, rounds=result.rounds_used)


def _auction_rounds(result: SolveResult, graph: CommGraph) -> MessageStats:
    """拍卖：每轮每条边双向各发送一次当前列表"""
    list_lengths: List[List[int]] = result.trace.get('list_lengths', [])
    degree = np.array([graph.graph.degree(i) for i in range(graph.n_agents)], dtype=np.int64)
    messages = 2 * graph.n_edges * len(list_lengths)
    volume = int(sum(int(np.dot(degree, lengths)) for lengths in list_lengths))
    return MessageStats(messages=messages, volume=volume, span=len(list_lengths),
                        broadcast_messages=messages, rounds=result.rounds_used)


_ACCOUNTANTS = {
    "sequential": _sequential_chain,
    "general": _sequential_chain,
    "rsp": _partition_rounds,
    "rrsp": _partition_rounds,
    "dsga": _dsga_commits,
    "auction": _auction_rounds,
}


def account_solver_messages(result: SolveResult, graph: CommGraph) -> MessageStats:
    """统计一次求解所需的消息；myopic 与 random 不通信"""
    if result.family in ("myopic", "random"):
        return MessageStats(messages=0, volume=0, span=0, broadcast_messages=0, rounds=result.rounds_used)
    accountant = _ACCOUNTANTS.get(result.family)
    if accountant is None:
        raise InvalidArgumentError(f"no message accounting for solver family '{result.family}'")
    return accountant(result, graph)
