# swarm/objectives/composite.py
from typing import List, Sequence

import numpy as np

from swarm.models.selection_model import GroundElement, Selection
from swarm.setfun.set_function import SetObjective


class SumObjective(SetObjective):
    """若干分量目标之和 f = Σ_k f_k（求和分解的载体）"""

    def __init__(self, components: Sequence[SetObjective]):
        self.components: List[SetObjective] = list(components)
        self.is_stochastic = any(c.is_stochastic for c in self.components)

    def evaluate(self, selection: Selection) -> float:
        return float(sum(c.evaluate(selection) for c in self.components))

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        total = np.zeros(len(candidates), dtype=float)
        for component in self.components:
            total += component.marginal_gains(candidates, base)
        return total

    def may_interact(self, agent_i: int, agent_j: int) -> bool:
        return any(c.may_interact(agent_i, agent_j) for c in self.components)
