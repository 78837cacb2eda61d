# swarm/tracking/robot_planner.py
from typing import Dict, List, Tuple

import numpy as np

from config import SwarmConfig
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective, best_index
from swarm.solvers.base_solver import block_argmax


def distinct_paths(candidates: List[GroundElement]) -> Tuple[List[GroundElement], np.ndarray]:
    """按路径去重：返回每条不同路径的最小序号候选，以及每个候选对应的代表下标"""
    first: Dict[Tuple[int, ...], int] = {}
    representatives: List[GroundElement] = []
    owner = np.empty(len(candidates), dtype=np.int64)
    for k, x in enumerate(candidates):
        path = tuple(x.payload_ref)
        if path not in first:
            first[path] = len(representatives)
            representatives.append(x)
        owner[k] = first[path]
    return representatives, owner


def plan_single_robot(objective: SetObjective, matroid: SimplePartitionMatroid, robot: int, prior: Selection,
                      tie_tolerance: float = SwarmConfig.SOLVER.TIE_TOLERANCE) -> Tuple[GroundElement, float]:
    """单机器人规划：相对先前决策取边际增益最大的两步动作序列

    靠近边界时不少序列走出相同的路径（撞墙即原地不动），增益相同，只对不同路径求值一次。
    所有候选共享目标函数的噪声流；平局取最小序列序号。
    拟阵没有路径负载时退化为逐个求值。
    """
    candidates = matroid.block(robot)
    if any(x.payload_ref is None for x in candidates):
        return block_argmax(objective, matroid, robot, prior, tie_tolerance)
    representatives, owner = distinct_paths(candidates)
    gains = objective.marginal_gains(representatives, prior)[owner]
    k = best_index(gains, tie_tolerance)
    return candidates[k], float(gains[k])
