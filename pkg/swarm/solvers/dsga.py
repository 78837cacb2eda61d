# swarm/solvers/dsga.py
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from swarm.solvers.base_solver import PlannerDag, SolveResult, SolverConfig, block_argmax, check_blocks
from utils.logger_handler import AppLogger


@dataclass(frozen=True)
class DsgaCommit:
    """一次提交：轮次、智能体、本轮规划时的增益 I_0、提交时的增益 I_F"""
    round: int
    agent: int
    initial_gain: float
    commit_gain: float

    @property
    def decay(self) -> float:
        return self.initial_gain - self.commit_gain


def dsga_plan(f: SetObjective, m: SimplePartitionMatroid, n_d: int,
              config: Optional[SolverConfig] = None,
              replan: bool = True) -> SolveResult:
    """分布式顺序贪心分配

    共 n_d 轮。每轮所有未分配智能体针对已固定集合 Y_F 规划并记录 I_0；
    随后依次提交 ⌈n_a/n_d⌉ 个计划，每次选 I_0 − I_F 最小者（平局取 I_0 大者，再取编号小者），
    每次提交后更新其余智能体的 I_F。ψ 为各次提交的 I_0 − I_F 之和。

    replan=True 时未提交智能体在每次提交后针对新的 Y_F 重新取最优动作，I_F 为其新增益；
    replan=False 时保留本轮初始计划，I_F 为该计划在新 Y_F 下的增益。
    """
    if n_d < 1:
        raise InvalidArgumentError(f"n_d must be >= 1, got {n_d}")
    config = config or SolverConfig()
    check_blocks(m)
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    tol = config.tie_tolerance

    n_agents = m.n_agents
    per_round = math.ceil(n_agents / n_d)
    fixed = Selection()
    unassigned = list(range(n_agents))
    commits: List[DsgaCommit] = []
    round_of_agent = [0] * n_agents
    rounds_used = 0

    for round_index in range(1, n_d + 1):
        if not unassigned:
            break
        rounds_used = round_index

        def plan(agent: int) -> Tuple[GroundElement, float]:
            return block_argmax(f, m, agent, fixed, tol)

        if config.max_workers > 1:
            with ThreadPoolExecutor(max_workers=config.max_workers) as executor:
                planned = list(executor.map(plan, unassigned))
        else:
            planned = [plan(agent) for agent in unassigned]

        plans: Dict[int, GroundElement] = {a: p[0] for a, p in zip(unassigned, planned)}
        initial: Dict[int, float] = {a: p[1] for a, p in zip(unassigned, planned)}
        updated: Dict[int, float] = dict(initial)

        for _ in range(per_round):
            if not unassigned:
                break
            decay = {a: initial[a] - updated[a] for a in unassigned}
            least = min(decay.values())
            tied = [a for a in unassigned if decay[a] <= least + tol]
            top = max(initial[a] for a in tied)
            chosen = min(a for a in tied if initial[a] >= top - tol)

            commits.append(DsgaCommit(round_index, chosen, initial[chosen], updated[chosen]))
            fixed = fixed.add(plans[chosen])
            round_of_agent[chosen] = round_index
            unassigned.remove(chosen)

            for agent in unassigned:
                if replan:
                    plans[agent], updated[agent] = block_argmax(f, m, agent, fixed, tol)
                else:
                    updated[agent] = float(f.marginal_gains([plans[agent]], fixed)[0])

        logger.debug(f"DSGA 第 {round_index} 轮完成，已固定 {len(fixed)} 个计划")

    psi = float(sum(c.decay for c in commits))
    order = [c.agent for c in commits]
    return SolveResult(
        selection=fixed,
        value=f.evaluate(fixed),
        per_agent_gain=[c.commit_gain for c in commits],
        rounds_used=rounds_used,
        psi=psi,
        dag=PlannerDag.complete(order),
        round_of_agent=round_of_agent,
        family="dsga",
        trace={'commits': commits},
    )
