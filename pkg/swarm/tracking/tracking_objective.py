# swarm/tracking/tracking_objective.py
"""多目标跟踪的互信息目标（蒙特卡洛估计）

对每个目标：按公共噪声流采样目标初始位置与随机游走、各机器人沿所选动作序列得到的测距，
再把滤波器向前推进，得到
    Σ_{i=1..l} [ H(先验在 t+i) − E H(后验在 t+i) ]
的样本均值（每个目标截断为非负）。总目标为各目标之和，因此按目标拆分是精确的求和分解。

噪声按机器人编号索引，候选动作之间共享同一组随机数，使单智能体 argmax 在一个规划周期内稳定。
"""
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.setfun.set_function import SetObjective
from swarm.tracking.grid_world import GridWorld, action_sequences, range_mean_var
from swarm.tracking.target_filter import TargetFilter, entropy_bits, normalize_rows, predict_probs


# ============1. 公共随机数===============

@dataclass(frozen=True, eq=False)
class TrackingNoise:
    """一个规划周期的噪声流

    Attributes:
        z: (样本, 目标, 步, 机器人) 标准正态，生成测距噪声
        u_init: (样本, 目标) 均匀数，按逆 CDF 采样目标初始位置
        u_walk: (样本, 目标, 步) 均匀数，生成目标随机游走动作
    """
    z: np.ndarray
    u_init: np.ndarray
    u_walk: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, n_samples: int, n_targets: int, horizon: int,
             n_robots: int) -> 'TrackingNoise':
        if n_samples < 1:
            raise InvalidArgumentError(f"n_samples must be >= 1, got {n_samples}")
        return cls(
            z=rng.standard_normal((n_samples, n_targets, horizon, n_robots)),
            u_init=rng.random((n_samples, n_targets)),
            u_walk=rng.random((n_samples, n_targets, horizon)),
        )

    @property
    def n_samples(self) -> int:
        return int(self.u_init.shape[0])


# ============2. 单目标的预计算===============

@dataclass(frozen=True, eq=False)
class _TargetModel:
    """目标 k 在其支撑包围盒上的递推数据

    包围盒是先验支撑向外扩展 horizon 格后与网格求交，
    在 horizon 步内概率质量不会到达非真实边界的盒边，盒内递推与全网格精确一致。
    """
    cells: np.ndarray          # 盒内格子的全局下标
    shape: Tuple[int, int]     # (行数, 列数)
    prior: np.ndarray          # 盒内先验
    trajectories: np.ndarray   # (样本, 步) 目标所在全局格子
    prior_entropy: np.ndarray  # (步,) 只做预测时的熵


def _target_model(world: GridWorld, f: TargetFilter, u_init: np.ndarray, u_walk: np.ndarray,
                  horizon: int, sparse_threshold: float) -> _TargetModel:
    side = world.side
    support = np.flatnonzero(f.probs > 0)
    ys, xs = np.divmod(support, side)
    y0, y1 = max(0, ys.min() - horizon), min(side - 1, ys.max() + horizon)
    x0, x1 = max(0, xs.min() - horizon), min(side - 1, xs.max() + horizon)
    rows, cols = np.meshgrid(np.arange(y0, y1 + 1), np.arange(x0, x1 + 1), indexing='ij')
    cells = (rows * side + cols).ravel()
    shape = (y1 - y0 + 1, x1 - x0 + 1)
    prior = f.probs[cells]

    cdf = np.cumsum(f.probs)
    start = np.minimum(np.searchsorted(cdf, u_init * cdf[-1], side='right'), world.n_cells - 1)
    trajectories = np.empty((u_init.shape[0], horizon), dtype=np.int64)
    current = start
    for i in range(horizon):
        actions = np.minimum((u_walk[:, i] * 5).astype(np.int64), 4)
        current = world.move(current, actions)
        trajectories[:, i] = current

    entropies = np.empty(horizon)
    belief = prior
    for i in range(horizon):
        predicted = predict_probs(belief, shape)
        belief, _ = normalize_rows(predicted, predicted, sparse_threshold)
        entropies[i] = float(entropy_bits(belief))
    return _TargetModel(cells, shape, prior, trajectories, entropies)


# ============3. 目标函数===============

class TrackingObjective(SetObjective):
    """跟踪互信息目标；地面集元素为 (机器人, 两步动作序列序号)"""

    is_stochastic = True

    def __init__(self, world: GridWorld, filters: Sequence[TargetFilter], robot_cells: Sequence[int],
                 noise: TrackingNoise, horizon: int = SwarmConfig.TRACKING.HORIZON,
                 sparse_threshold: Optional[float] = None, cache_size: int = 512):
        if noise.z.shape[1] != len(filters) or noise.z.shape[3] != len(robot_cells):
            raise InvalidArgumentError("noise stream does not match the number of targets and robots")
        if noise.z.shape[2] < horizon:
            raise InvalidArgumentError("noise stream is shorter than the planning horizon")
        self.world = world
        self.filters = tuple(filters)
        self.robot_cells = tuple(int(c) for c in robot_cells)
        self.noise = noise
        self.seed_context = noise
        self.horizon = horizon
        self.sequences = action_sequences(horizon)
        self.sparse_threshold = (sparse_threshold if sparse_threshold is not None
                                 else max((f.sparse_threshold for f in self.filters), default=0.0))
        self._models: Dict[int, _TargetModel] = {}
        self._paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self._products: "OrderedDict[tuple, Optional[List[np.ndarray]]]" = OrderedDict()
        self._cache_size = cache_size
        self._lock = threading.Lock()

    @property
    def n_robots(self) -> int:
        return len(self.robot_cells)

    @property
    def n_targets(self) -> int:
        return len(self.filters)

    def matroid(self) -> SimplePartitionMatroid:
        paths = tuple(tuple(self.world.follow(cell, seq) for seq in self.sequences) for cell in self.robot_cells)
        return SimplePartitionMatroid((len(self.sequences),) * self.n_robots, paths)

    # ----内部：缓存的预计算----

    def _model(self, k: int) -> _TargetModel:
        with self._lock:
            model = self._models.get(k)
        if model is None:
            model = _target_model(self.world, self.filters[k], self.noise.u_init[:, k],
                                  self.noise.u_walk[:, k], self.horizon, self.sparse_threshold)
            with self._lock:
                self._models[k] = model
        return model

    def _path(self, x: GroundElement) -> Tuple[int, ...]:
        key = x.key
        path = self._paths.get(key)
        if path is None:
            path = self.world.follow(self.robot_cells[x.agent_id], self.sequences[x.action_id])
            self._paths[key] = path
        return path

    def _likelihoods(self, elements: Sequence[GroundElement], k: int, step: int) -> np.ndarray:
        """各元素在第 step 步对目标 k 的测距似然，(元素, 样本, 盒内格子)"""
        model = self._model(k)
        positions = np.array([self._path(x)[step] for x in elements], dtype=np.int64)
        robots = np.array([x.agent_id for x in elements], dtype=np.int64)
        here = self.world.coords[positions]
        to_target = np.linalg.norm(here[:, None, :] - self.world.coords[model.trajectories[:, step]][None], axis=2)
        true_mean, true_var = range_mean_var(to_target)
        y = true_mean + np.sqrt(true_var) * self.noise.z[:, k, step, robots].T
        to_cells = np.linalg.norm(here[:, None, :] - self.world.coords[model.cells][None], axis=2)
        mean, var = range_mean_var(to_cells)
        return norm.pdf(y[:, :, None], loc=mean[:, None, :], scale=np.sqrt(var)[:, None, :])

    def _base_product(self, base: Selection, k: int) -> Optional[List[np.ndarray]]:
        if len(base) == 0:
            return None
        key = (base.keys(), k)
        with self._lock:
            if key in self._products:
                self._products.move_to_end(key)
                return self._products[key]
        product = [np.prod(self._likelihoods(base.elements, k, step), axis=0) for step in range(self.horizon)]
        with self._lock:
            self._products[key] = product
            while len(self._products) > self._cache_size:
                self._products.popitem(last=False)
        return product

    def _recursion(self, k: int, likelihoods: List[np.ndarray]) -> np.ndarray:
        """likelihoods[i] 形状 (..., 样本, 盒内格子)；返回 (...) 的截断互信息"""
        model = self._model(k)
        belief = np.broadcast_to(model.prior, likelihoods[0].shape)
        information = np.zeros(likelihoods[0].shape[:-2])
        for step in range(self.horizon):
            predicted = predict_probs(belief, model.shape)
            belief, _ = normalize_rows(predicted * likelihoods[step], predicted, self.sparse_threshold)
            information += model.prior_entropy[step] - entropy_bits(belief).mean(axis=-1)
        return np.maximum(information, 0.0)

    # ----按目标子集求值----

    def target_values(self, selection: Selection, targets: Optional[Sequence[int]] = None) -> np.ndarray:
        """每个目标的截断互信息估计"""
        targets = range(self.n_targets) if targets is None else targets
        values = []
        for k in targets:
            product = self._base_product(selection, k)
            values.append(0.0 if product is None else float(self._recursion(k, product)))
        return np.asarray(values, dtype=float)

    def target_gains(self, candidates: Sequence[GroundElement], base: Selection,
                     targets: Optional[Sequence[int]] = None) -> np.ndarray:
        targets = list(range(self.n_targets)) if targets is None else list(targets)
        gains = np.zeros(len(candidates), dtype=float)
        fresh = [c for c, x in enumerate(candidates) if x not in base]
        if not fresh:
            return gains
        elements = [candidates[c] for c in fresh]
        base_values = self.target_values(base, targets)
        for k, base_value in zip(targets, base_values):
            product = self._base_product(base, k)
            stacked = []
            for step in range(self.horizon):
                liks = self._likelihoods(elements, k, step)
                stacked.append(liks if product is None else liks * product[step][None])
            gains[fresh] += self._recursion(k, stacked) - base_value
        return gains

    def evaluate(self, selection: Selection) -> float:
        if len(selection) == 0:
            return 0.0
        return float(self.target_values(selection).sum())

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        return self.target_gains(candidates, base)

    # ----分解与限距视图----

    def components(self) -> List['TrackingObjectiveView']:
        """按目标拆分的求和分解，各分量与本目标共享噪声流"""
        return [TrackingObjectiveView(self, (k,)) for k in range(self.n_targets)]

    def restricted_to(self, robot: int,
                      target_range: float = SwarmConfig.TRACKING.TARGET_RANGE_LIMIT,
                      robot_range: float = SwarmConfig.TRACKING.ROBOT_RANGE_LIMIT) -> 'TrackingObjectiveView':
        """限距规划的本地目标：忽略均值距离超过 target_range 的目标与距离超过 robot_range 的机器人的决策"""
        here = self.world.coords[self.robot_cells[robot]]
        targets = tuple(k for k, f in enumerate(self.filters)
                        if np.linalg.norm(f.mean_position(self.world) - here) <= target_range)
        robots = frozenset(r for r, cell in enumerate(self.robot_cells)
                           if np.linalg.norm(self.world.coords[cell] - here) <= robot_range)
        return TrackingObjectiveView(self, targets, robots)


class TrackingObjectiveView(SetObjective):
    """只统计部分目标、只参考部分机器人决策的跟踪目标视图"""

    is_stochastic = True

    def __init__(self, parent: TrackingObjective, targets: Sequence[int], robots: Optional[frozenset] = None):
        self.parent = parent
        self.targets = tuple(targets)
        self.robots = robots
        self.seed_context = parent.seed_context

    def _visible(self, selection: Selection) -> Selection:
        return selection if self.robots is None else selection.restrict_to(self.robots)

    def evaluate(self, selection: Selection) -> float:
        if not self.targets:
            return 0.0
        return float(self.parent.target_values(self._visible(selection), self.targets).sum())

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        if not self.targets:
            return np.zeros(len(candidates))
        return self.parent.target_gains(candidates, self._visible(base), self.targets)
