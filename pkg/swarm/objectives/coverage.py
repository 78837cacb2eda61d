# swarm/objectives/coverage.py
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import InvalidProblemError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective


# ============1. 概率覆盖===============

@dataclass(frozen=True, eq=False)
class ProbCoverageProblem:
    """概率加权覆盖问题

    每个事件 e 有位置与价值 v_e；动作 x 独立地以概率 p^e_x 漏检事件 e。
    failure[i] 是智能体 i 的 (|B_i|, n_events) 漏检概率矩阵。

    Attributes:
        event_positions: (n_events, 2) 单位正方形内的事件坐标
        event_values: (n_events,) 非负事件价值
        failure: 每个智能体一个漏检概率矩阵
        action_centers: 每个智能体 (|B_i|, 2) 的感知动作中心，可选
    """
    event_positions: np.ndarray
    event_values: np.ndarray
    failure: Tuple[np.ndarray, ...]
    action_centers: Optional[Tuple[np.ndarray, ...]] = None

    def __post_init__(self):
        values = np.asarray(self.event_values, dtype=float)
        object.__setattr__(self, 'event_values', values)
        object.__setattr__(self, 'event_positions', np.asarray(self.event_positions, dtype=float).reshape(-1, 2))
        failure = tuple(np.atleast_2d(np.asarray(p, dtype=float)) for p in self.failure)
        object.__setattr__(self, 'failure', failure)

        if np.any(values < 0):
            raise InvalidProblemError("event values must be non-negative")
        for i, p in enumerate(failure):
            if p.shape[1] != values.shape[0]:
                raise InvalidProblemError(f"failure matrix of agent {i} has {p.shape[1]} events, expected {values.shape[0]}")
            if np.any(p < 0) or np.any(p > 1):
                raise InvalidProblemError(f"failure probabilities of agent {i} outside [0, 1]")

    @classmethod
    def from_sensor_model(cls,
                          event_positions: np.ndarray,
                          event_values: np.ndarray,
                          action_centers: Sequence[np.ndarray],
                          success_prob: Callable[[np.ndarray], np.ndarray]) -> 'ProbCoverageProblem':
        """由距离→检测成功率的传感器模型构造漏检矩阵"""
        events = np.asarray(event_positions, dtype=float).reshape(-1, 2)
        failure = []
        for centers in action_centers:
            centers = np.asarray(centers, dtype=float).reshape(-1, 2)
            distance = np.linalg.norm(centers[:, None, :] - events[None, :, :], axis=2)
            failure.append(1.0 - success_prob(distance))
        return cls(events, np.asarray(event_values, dtype=float), tuple(failure),
                   tuple(np.asarray(c, dtype=float).reshape(-1, 2) for c in action_centers))

    @property
    def n_events(self) -> int:
        return int(self.event_values.shape[0])

    def failure_prob(self, x: GroundElement, event: int) -> float:
        return float(self.failure[x.agent_id][x.action_id, event])

    def matroid(self) -> SimplePartitionMatroid:
        payloads = None
        if self.action_centers is not None:
            payloads = tuple(tuple(tuple(c) for c in centers) for centers in self.action_centers)
        return SimplePartitionMatroid(tuple(p.shape[0] for p in self.failure), payloads)


def _survival(problem: ProbCoverageProblem, s: Selection) -> np.ndarray:
    survival = np.ones(problem.n_events, dtype=float)
    for x in s:
        survival = survival * problem.failure[x.agent_id][x.action_id]
    return survival


def prob_coverage_value(p: ProbCoverageProblem, s: Selection) -> float:
    """Σ_e v_e (1 − Π_{x∈s} p^e_x)"""
    return float(p.event_values @ (1.0 - _survival(p, s)))


class ProbCoverageObjective(SetObjective):
    """概率覆盖目标；边际增益按基选择的事件存活概率增量计算"""

    def __init__(self, problem: ProbCoverageProblem):
        self.problem = problem
        # 每个智能体能以正概率检测到的事件
        self._reach = [np.any(p < 1.0, axis=0) for p in problem.failure]

    def evaluate(self, selection: Selection) -> float:
        return prob_coverage_value(self.problem, selection)

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        if not candidates:
            return np.zeros(0)
        survival = _survival(self.problem, base)
        rows = np.stack([self.problem.failure[x.agent_id][x.action_id] for x in candidates])
        gains = ((1.0 - rows) * survival) @ self.problem.event_values
        in_base = np.fromiter((x in base for x in candidates), dtype=bool, count=len(candidates))
        gains[in_base] = 0.0
        return gains

    def may_interact(self, agent_i: int, agent_j: int) -> bool:
        return bool(np.any(self._reach[agent_i] & self._reach[agent_j]))

    def event_components(self) -> List['ProbCoverageObjective']:
        """按事件拆分的求和分解，每个分量只保留一个事件"""
        components = []
        for e in range(self.problem.n_events):
            sub = ProbCoverageProblem(
                self.problem.event_positions[e:e + 1],
                self.problem.event_values[e:e + 1],
                tuple(p[:, e:e + 1] for p in self.problem.failure),
                self.problem.action_centers,
            )
            components.append(ProbCoverageObjective(sub))
        return components


def weighted_coverage(item_values: Sequence[float],
                      covers: Sequence[Sequence[Iterable[int]]]) -> Tuple[ProbCoverageObjective, SimplePartitionMatroid]:
    """确定性加权集合覆盖（漏检概率只取 0 或 1）

    Args:
        item_values: 每个被覆盖项的价值
        covers: covers[i][a] 是智能体 i 的动作 a 覆盖的项下标
    """
    values = np.asarray(item_values, dtype=float)
    failure = []
    for agent_covers in covers:
        matrix = np.ones((len(agent_covers), values.shape[0]))
        for a, items in enumerate(agent_covers):
            for item in items:
                matrix[a, item] = 0.0
        failure.append(matrix)
    problem = ProbCoverageProblem(np.zeros((values.shape[0], 2)), values, tuple(failure))
    return ProbCoverageObjective(problem), problem.matroid()


# ============2. 面积覆盖===============

@dataclass(frozen=True, eq=False)
class AreaCoverageProblem:
    """单位正方形内圆盘并集面积，用单元中心网格离散近似

    Attributes:
        action_centers: 每个智能体 (|B_i|, 2) 的动作中心
        sensor_radius: 感知半径 r_s
        grid_resolution: 每边网格数
        agent_centers: (n, 2) 智能体位置，可选
    """
    action_centers: Tuple[np.ndarray, ...]
    sensor_radius: float
    grid_resolution: int = SwarmConfig.OBJECTIVE.GRID_RESOLUTION
    agent_centers: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        centers = tuple(np.asarray(c, dtype=float).reshape(-1, 2) for c in self.action_centers)
        object.__setattr__(self, 'action_centers', centers)
        if self.sensor_radius <= 0:
            raise InvalidProblemError("sensor radius must be positive")
        if self.grid_resolution < 1:
            raise InvalidProblemError("grid resolution must be positive")
        for i, c in enumerate(centers):
            if c.shape[0] == 0:
                raise InvalidProblemError(f"empty action block for agent {i}")
            if np.any(c < 0) or np.any(c > 1):
                raise InvalidProblemError(f"action centers of agent {i} leave the unit square")

    @property
    def n_cells(self) -> int:
        return self.grid_resolution ** 2

    def matroid(self) -> SimplePartitionMatroid:
        payloads = tuple(tuple(tuple(c) for c in centers) for centers in self.action_centers)
        return SimplePartitionMatroid(tuple(c.shape[0] for c in self.action_centers), payloads)

    def disk_cells(self, center: Sequence[float]) -> np.ndarray:
        """圆盘覆盖的单元中心（扁平下标 row * res + col，row 沿 y 轴）"""
        res, r = self.grid_resolution, self.sensor_radius
        x, y = float(center[0]), float(center[1])
        cols = np.arange(max(0, int(np.floor((x - r) * res - 0.5))), min(res, int(np.ceil((x + r) * res + 0.5))))
        rows = np.arange(max(0, int(np.floor((y - r) * res - 0.5))), min(res, int(np.ceil((y + r) * res + 0.5))))
        cx = (cols + 0.5) / res
        cy = (rows + 0.5) / res
        inside = (cx[None, :] - x) ** 2 + (cy[:, None] - y) ** 2 <= r * r
        rr, cc = np.nonzero(inside)
        return (rows[rr] * res + cols[cc]).astype(np.int64)

    @cached_property
    def cell_indices(self) -> Tuple[Tuple[np.ndarray, ...], ...]:
        return tuple(tuple(self.disk_cells(c) for c in centers) for centers in self.action_centers)


def _covered_mask(p: AreaCoverageProblem, s: Selection) -> np.ndarray:
    mask = np.zeros(p.n_cells, dtype=bool)
    for x in s:
        mask[p.cell_indices[x.agent_id][x.action_id]] = True
    return mask


def area_coverage_value(p: AreaCoverageProblem, s: Selection) -> float:
    """被选中圆盘覆盖的单元中心比例"""
    if len(s) == 0:
        return 0.0
    return float(np.count_nonzero(_covered_mask(p, s))) / p.n_cells


class AreaCoverageObjective(SetObjective):
    """面积覆盖目标

    按选择前缀缓存覆盖掩码：贪心与拍卖反复在共享前缀上求边际增益，
    新前缀从已缓存的最长前缀增量构造。
    """

    def __init__(self, problem: AreaCoverageProblem, cache_size: int = 128):
        self.problem = problem
        self._cache_size = cache_size
        self._masks: "OrderedDict[Tuple[Tuple[int, int], ...], np.ndarray]" = OrderedDict()
        self._lock = threading.Lock()

    def _mask_for(self, base: Selection) -> np.ndarray:
        keys = base.keys()
        with self._lock:
            start, mask = 0, None
            for length in range(len(keys), 0, -1):
                cached = self._masks.get(keys[:length])
                if cached is not None:
                    self._masks.move_to_end(keys[:length])
                    start, mask = length, cached
                    break
        mask = np.zeros(self.problem.n_cells, dtype=bool) if mask is None else mask.copy()
        for x in base.elements[start:]:
            mask[self.problem.cell_indices[x.agent_id][x.action_id]] = True
        if keys and start < len(keys):
            with self._lock:
                self._masks[keys] = mask
                while len(self._masks) > self._cache_size:
                    self._masks.popitem(last=False)
        return mask

    def evaluate(self, selection: Selection) -> float:
        if len(selection) == 0:
            return 0.0
        return float(np.count_nonzero(self._mask_for(selection))) / self.problem.n_cells

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        mask = self._mask_for(base)
        gains = np.zeros(len(candidates), dtype=float)
        for k, x in enumerate(candidates):
            if x in base:
                continue
            cells = self.problem.cell_indices[x.agent_id][x.action_id]
            gains[k] = float(np.count_nonzero(~mask[cells])) / self.problem.n_cells
        return gains

    def may_interact(self, agent_i: int, agent_j: int) -> bool:
        a = self.problem.action_centers[agent_i]
        b = self.problem.action_centers[agent_j]
        gap = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2).min()
        # 网格离散带来的半个单元余量
        return bool(gap <= 2 * self.problem.sensor_radius + 2.0 / self.problem.grid_resolution)


def prob_coverage_from_area(p: AreaCoverageProblem) -> ProbCoverageProblem:
    """把面积覆盖改写成每个网格单元一个事件（价值 1/cells，漏检概率 0 或 1）

    矩阵规模为 动作数 × 单元数，只适合低分辨率网格。
    """
    res = p.grid_resolution
    cols, rows = np.meshgrid(np.arange(res), np.arange(res))
    positions = np.column_stack([(cols.ravel() + 0.5) / res, (rows.ravel() + 0.5) / res])
    failure = []
    for agent_cells in p.cell_indices:
        matrix = np.ones((len(agent_cells), p.n_cells))
        for a, cells in enumerate(agent_cells):
            matrix[a, cells] = 0.0
        failure.append(matrix)
    values = np.full(p.n_cells, 1.0 / p.n_cells)
    return ProbCoverageProblem(positions, values, tuple(failure), p.action_centers)
