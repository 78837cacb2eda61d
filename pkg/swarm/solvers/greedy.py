# swarm/solvers/greedy.py
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from swarm.solvers.base_solver import PlannerDag, SolveResult, SolverConfig, check_blocks, dag_greedy


def sequential_greedy(f: SetObjective, m: SimplePartitionMatroid,
                      order: Optional[Sequence[int]] = None,
                      config: Optional[SolverConfig] = None) -> SolveResult:
    """局部贪心：按给定顺序，每个智能体在全部先前决策条件下选最大边际增益动作"""
    check_blocks(m)
    order = list(range(m.n_agents)) if order is None else [int(a) for a in order]
    if sorted(order) != list(range(m.n_agents)):
        raise InvalidArgumentError("order must be a permutation of the agents")
    return dag_greedy(f, m, PlannerDag.complete(order), config, family="sequential")


def myopic_plan(f: SetObjective, m: SimplePartitionMatroid,
                config: Optional[SolverConfig] = None) -> SolveResult:
    """短视规划：每个智能体忽略所有其他智能体"""
    return dag_greedy(f, m, PlannerDag.empty(m.n_agents), config, family="myopic")


def random_plan(m: SimplePartitionMatroid, rng: np.random.Generator,
                f: Optional[SetObjective] = None) -> SolveResult:
    """每个动作块均匀随机选一个动作；给出 f 时同时记录目标值"""
    check_blocks(m)
    actions = rng.integers(0, np.asarray(m.blocks))
    selection = Selection(tuple(m.element(i, int(a)) for i, a in enumerate(actions)))
    gains: List[float] = []
    value = 0.0
    if f is not None:
        for k, x in enumerate(selection):
            gains.append(float(f.marginal_gains([x], selection.prefix(k))[0]))
        value = f.evaluate(selection)
    return SolveResult(selection=selection, value=value, per_agent_gain=gains,
                       rounds_used=1, dag=PlannerDag.empty(m.n_agents), family="random")


def greedy_over(f: SetObjective, ground: Dict[int, Sequence[GroundElement]], tie_tolerance: float) -> Tuple[Selection, List[float]]:
    """一般贪心：在给定的（可能缩减的）地面集上反复加入全局最佳可行元素

    ground 把 agent_id 映射到该智能体可选的元素；平局按 (agent_id, action_id) 字典序。
    """
    selection = Selection()
    gains: List[float] = []
    remaining = {agent: list(elements) for agent, elements in ground.items() if elements}
    while remaining:
        candidates = [x for agent in sorted(remaining) for x in sorted(remaining[agent])]
        values = f.marginal_gains(candidates, selection)
        top = values.max()
        winners = [x for x, v in zip(candidates, values) if v >= top - tie_tolerance]
        best = min(winners)
        best_gain = float(values[candidates.index(best)])
        selection = selection.add(best)
        gains.append(best_gain)
        del remaining[best.agent_id]
    return selection, gains


def general_greedy(f: SetObjective, m: SimplePartitionMatroid,
                   config: Optional[SolverConfig] = None) -> SolveResult:
    """一般贪心：每步从所有未分配智能体的动作中选全局最佳元素"""
    config = config or SolverConfig()
    check_blocks(m)
    ground = {agent: m.block(agent) for agent in range(m.n_agents)}
    selection, gains = greedy_over(f, ground, config.tie_tolerance)
    order = selection.agents()
    return SolveResult(
        selection=selection,
        value=f.evaluate(selection),
        per_agent_gain=gains,
        rounds_used=m.n_agents,
        dag=PlannerDag.complete(order),
        family="general",
    )
