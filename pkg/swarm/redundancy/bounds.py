# swarm/redundancy/bounds.py
"""次优性上界：删除边冗余、事后界、在线/无关界、DSGA 的 ψ 以及代价形式的事后界"""
import math
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from swarm.exceptions import InvalidArgumentError
from swarm.models.result_model import BoundReport
from swarm.models.selection_model import Selection, SimplePartitionMatroid
from swarm.redundancy.redundancy_graph import RedundancyGraph
from swarm.setfun.set_function import SetObjective
from swarm.solvers.base_solver import PlannerDag, SolveResult
from swarm.solvers.dsga import DsgaCommit

# 决策确实按 DAG 贪心做出的求解器族，事后界 2f + Σw 对它们成立
DAG_GREEDY_FAMILIES = ("sequential", "general", "myopic", "rsp", "rrsp", "dag", "auction")


def deleted_edge_weight(graph: RedundancyGraph, dag: PlannerDag) -> float:
    """Σ_i Σ_{j∈N̂_i} w_ij"""
    if graph.n_agents != dag.n_agents:
        raise InvalidArgumentError(f"graph has {graph.n_agents} agents, dag has {dag.n_agents}")
    return float(sum(graph.weights[i, j] for i, j in dag.deleted_edges()))


def posthoc_bound(result: SolveResult, graph: RedundancyGraph) -> float:
    """f* ≤ 2·f(X^d) + 被删除边的冗余权重"""
    if result.dag is None:
        raise InvalidArgumentError("post-hoc bound needs the planner dag")
    return 2.0 * result.value + deleted_edge_weight(graph, result.dag)


def online_bounds(f: SetObjective, m: SimplePartitionMatroid, s: Selection) -> Tuple[float, float]:
    """(在线界, 无关界)

    在线界 = f(s) + Σ_i max_{x∈B_i} f(x | s)；无关界 = Σ_i max_{x∈B_i} f({x})
    """
    online = f.evaluate(s)
    oblivious = 0.0
    for i in range(m.n_agents):
        block = m.block(i)
        online += max(0.0, float(np.max(f.marginal_gains(block, s))))
        oblivious += max(0.0, float(np.max(f.singleton_values(block))))
    return online, oblivious


def dsga_psi(trace: Union[SolveResult, dict, Iterable[DsgaCommit]]) -> float:
    """ψ = Σ 各次提交的 (规划时增益 − 提交时增益)"""
    if isinstance(trace, SolveResult):
        trace = trace.trace
    if isinstance(trace, dict):
        trace = trace.get('commits', [])
    return float(sum(c.decay for c in trace))


def alpha_estimate(graph: RedundancyGraph, best_value: float) -> Optional[float]:
    """描述性的 α = 总冗余 / 已知最优值"""
    if best_value <= 0:
        return None
    return graph.total_weight / best_value


# ============代价模型===============

def _decision_sets(result: SolveResult):
    if result.dag is None:
        raise InvalidArgumentError("cost terms need the planner dag")
    decisions = result.selection.by_agent()
    order = list(result.dag.agent_order)
    position = {a: k for k, a in enumerate(order)}
    for k, agent in enumerate(order):
        conditioned = Selection(tuple(decisions[j] for j in sorted(result.dag.in_neighbors[agent], key=position.get)))
        prior = Selection(tuple(decisions[j] for j in order[:k]))
        yield agent, decisions[agent], conditioned, prior


def distributed_costs(f: SetObjective, result: SolveResult) -> List[float]:
    """c_i = f(x_i | X_{N_i}) − f(x_i | X_{1:i−1})，按决策顺序"""
    costs = []
    for _, x, conditioned, prior in _decision_sets(result):
        costs.append(float(f.marginal_gains([x], conditioned)[0] - f.marginal_gains([x], prior)[0]))
    return costs


def planner_costs(f: SetObjective, m: SimplePartitionMatroid, result: SolveResult) -> List[float]:
    """γ_i = max_{x∈B_i} f(x | X_{N_i}) − f(x_i | X_{N_i})；精确求单智能体最优时为 0"""
    costs = []
    for agent, x, conditioned, _ in _decision_sets(result):
        gains = f.marginal_gains(m.block(agent), conditioned)
        costs.append(float(np.max(gains) - gains[x.action_id]))
    return costs


def posthoc_cost_bound(f: SetObjective, result: SolveResult) -> float:
    """f* ≤ 2·f(X^d) + Σ c_i"""
    return 2.0 * result.value + float(sum(distributed_costs(f, result)))


# ============汇总===============

def posthoc_terms(result: SolveResult, graph: Optional[RedundancyGraph] = None) -> Tuple[float, float]:
    """(事后界, 被删除边权重)；缺少冗余图而又有删除边时事后界为 inf"""
    if result.psi is not None:
        return 2.0 * result.value + result.psi, 0.0
    if result.family in DAG_GREEDY_FAMILIES and result.dag is not None and result.converged:
        if graph is not None:
            deleted = deleted_edge_weight(graph, result.dag)
            return 2.0 * result.value + deleted, deleted
        if not result.deleted_edges:
            return 2.0 * result.value, 0.0
    return math.inf, 0.0


def bound_report(f: SetObjective, m: SimplePartitionMatroid, result: SolveResult,
                 graph: Optional[RedundancyGraph] = None,
                 best_value: Optional[float] = None) -> BoundReport:
    """汇总一次求解的全部上界

    DSGA 的事后界取 2f + ψ；未收敛拍卖、随机选择等没有 DAG 贪心结构的结果事后界记为 inf。
    """
    value = result.value
    posthoc, deleted = posthoc_terms(result, graph)
    online, oblivious = online_bounds(f, m, result.selection)
    smallest = min(posthoc, online, oblivious)
    subopt = value / smallest if smallest > 0 else 1.0
    alpha = alpha_estimate(graph, best_value if best_value is not None else value) if graph is not None else None
    return BoundReport(value=value, deleted_weight=deleted, posthoc=posthoc, online=online,
                       oblivious=oblivious, subopt_lb=min(subopt, 1.0), alpha=alpha)
