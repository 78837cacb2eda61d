"""集合函数框架：目标函数基类、离散导数、拟阵可行性与穷举最优解"""
import itertools
import threading
from abc import ABC, abstractmethod
from typing import Any, Iterable, Optional, Sequence, Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import EnumerationTooLargeError, InvalidArgumentError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from utils.logger_handler import AppLogger


# ============1. 目标函数基类===============

class SetObjective(ABC):
    """规范化单调子模集合函数的求值接口

    子类必须保证 evaluate(∅) = 0；确定性目标对同一选择重复求值结果完全相同。
    随机目标（蒙特卡洛估计）把噪声流句柄放在 seed_context 中，同一句柄重放得到相同值。
    求值对多线程只读调用是安全的。
    """

    is_stochastic: bool = False
    seed_context: Optional[Any] = None

    @abstractmethod
    def evaluate(self, selection: Selection) -> float:
        """f(selection)"""

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        """批量边际增益 f(x | base)；已在 base 中的候选增益为 0

        默认逐个求值，具体目标可覆盖为向量化实现，但结果必须与逐个求值一致。
        """
        base_value = self.evaluate(base)
        gains = np.zeros(len(candidates), dtype=float)
        for k, x in enumerate(candidates):
            if x in base:
                continue
            gains[k] = self.evaluate(base.add(x)) - base_value
        return gains

    def singleton_values(self, candidates: Sequence[GroundElement]) -> np.ndarray:
        return self.marginal_gains(candidates, Selection())

    def may_interact(self, agent_i: int, agent_j: int) -> bool:
        """两个智能体的动作是否可能有冗余；返回 False 时冗余权重直接为 0"""
        return True


class CountingObjective(SetObjective):
    """包装目标函数并统计调用次数

    count 为边际增益求值次数（批量调用按候选数计），value_calls 为整体求值次数。
    """

    def __init__(self, inner: SetObjective):
        self.inner = inner
        self.is_stochastic = inner.is_stochastic
        self.seed_context = inner.seed_context
        self._lock = threading.Lock()
        self.count = 0
        self.value_calls = 0

    def _bump(self, n: int, value_calls: int = 0) -> None:
        with self._lock:
            self.count += n
            self.value_calls += value_calls

    def evaluate(self, selection: Selection) -> float:
        self._bump(0, 1)
        return self.inner.evaluate(selection)

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        self._bump(len(candidates))
        return self.inner.marginal_gains(candidates, base)

    def may_interact(self, agent_i: int, agent_j: int) -> bool:
        return self.inner.may_interact(agent_i, agent_j)

    def __getattr__(self, name):
        # 透传具体目标的其余属性（例如 tracking 的 restricted_to）
        if name == 'inner':
            raise AttributeError(name)
        return getattr(self.inner, name)


# ============2. 离散导数===============

def marginal_gain(f: SetObjective, x: GroundElement, base: Selection) -> float:
    """一阶离散导数 f(x | base) = f(base ∪ {x}) − f(base)"""
    if x in base:
        raise InvalidArgumentError(f"element {x.key} already present in base")
    return float(f.marginal_gains([x], base)[0])


def derivative(f: SetObjective, ys: Iterable[GroundElement], base: Selection) -> float:
    """集合导数 f(Y | X) = f(X ∪ Y) − f(X)，要求 Y 与 X 不相交"""
    ys = list(ys)
    overlap = [y.key for y in ys if y in base]
    if overlap:
        raise InvalidArgumentError(f"derivative sets overlap at {overlap}")
    return f.evaluate(base.union(ys)) - f.evaluate(base)


def second_derivative(f: SetObjective, a: GroundElement, b: GroundElement, base: Selection) -> float:
    """二阶离散导数 f(a; b | base)，子模函数该值 ≤ 0"""
    if a == b:
        raise InvalidArgumentError(f"second derivative needs distinct elements, got {a.key} twice")
    if a in base or b in base:
        raise InvalidArgumentError("second derivative arguments overlap the base")
    return (f.evaluate(base.union([a, b])) - f.evaluate(base.add(a))
            - f.evaluate(base.add(b)) + f.evaluate(base))


# ============3. 拟阵与穷举===============

def matroid_feasible(m: SimplePartitionMatroid, s: Selection) -> bool:
    """每个动作块至多一个元素"""
    seen = set()
    for element in s:
        m.check_element(element.agent_id, element.action_id)
        if element.agent_id in seen:
            return False
        seen.add(element.agent_id)
    return True


def brute_force_optimum(f: SetObjective, m: SimplePartitionMatroid,
                        cap: int = SwarmConfig.SOLVER.ENUMERATION_CAP,
                        tie_tolerance: float = SwarmConfig.SOLVER.TIE_TOLERANCE) -> Tuple[Selection, float]:
    """枚举所有基，返回最优基与最优值

    基按 (agent_id, action_id) 字典序枚举，只有严格超过当前最优（超出平局容差）才替换，
    因此平局时返回字典序最小的基。
    """
    size = m.n_bases()
    if size > cap:
        raise EnumerationTooLargeError(size, cap)

    logger = AppLogger.get_logger(__name__, app_name='swarm')
    logger.debug(f"穷举 {size} 个基")

    blocks = [m.block(i) for i in range(m.n_agents)]
    best_selection, best_value = None, -np.inf
    for combo in itertools.product(*blocks):
        selection = Selection(tuple(combo))
        value = f.evaluate(selection)
        if value > best_value + tie_tolerance:
            best_selection, best_value = selection, value
    return best_selection, float(best_value)


def best_index(values: Sequence[float], tie_tolerance: float = SwarmConfig.SOLVER.TIE_TOLERANCE) -> int:
    """取最大值下标，差距在容差内的并列值取最小下标"""
    values = np.asarray(values, dtype=float)
    top = values.max()
    return int(np.flatnonzero(values >= top - tie_tolerance)[0])
