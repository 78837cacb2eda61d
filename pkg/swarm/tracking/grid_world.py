# swarm/tracking/grid_world.py
"""四连通网格世界、目标随机游走与测距观测模型

格子用扁平下标 y * side + x 表示；动作 0 停留、1 北(+y)、2 南(-y)、3 东(+x)、4 西(-x)，
越界的移动变为停留。
"""
import math
from functools import lru_cache
from itertools import product
from typing import Tuple

import numpy as np

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError

ACTION_DELTAS = np.array([(0, 0), (0, 1), (0, -1), (1, 0), (-1, 0)], dtype=np.int64)
N_ACTIONS = len(ACTION_DELTAS)


def action_sequences(horizon: int = SwarmConfig.TRACKING.HORIZON) -> Tuple[Tuple[int, ...], ...]:
    """所有长度为 horizon 的动作序列，序号即 action_id"""
    return tuple(product(range(N_ACTIONS), repeat=horizon))


def grid_side(n_robots: int) -> int:
    """边长 = round(√(12.5 n))，至少为 2"""
    return max(2, int(math.floor(math.sqrt(SwarmConfig.TRACKING.GRID_DENSITY * n_robots) + 0.5)))


class GridWorld:
    """边长为 side 的四连通网格"""

    def __init__(self, side: int):
        if side < 2:
            raise InvalidArgumentError(f"grid side must be at least 2, got {side}")
        self.side = int(side)
        ys, xs = np.divmod(np.arange(self.n_cells), self.side)
        self.coords = np.column_stack([xs, ys]).astype(float)
        self.coords.setflags(write=False)

    @classmethod
    def for_robots(cls, n_robots: int) -> 'GridWorld':
        return cls(grid_side(n_robots))

    @property
    def n_cells(self) -> int:
        return self.side * self.side

    def __eq__(self, other) -> bool:
        return isinstance(other, GridWorld) and other.side == self.side

    def __hash__(self) -> int:
        return hash(('GridWorld', self.side))

    def check_cell(self, cell: int) -> None:
        if not 0 <= cell < self.n_cells:
            raise InvalidArgumentError(f"cell {cell} outside the {self.side}x{self.side} grid")

    def cell_of(self, x: int, y: int) -> int:
        return int(y) * self.side + int(x)

    def move(self, cells, actions):
        """批量移动；越界的移动变为停留"""
        cells = np.asarray(cells, dtype=np.int64)
        actions = np.asarray(actions, dtype=np.int64)
        y, x = np.divmod(cells, self.side)
        nx_ = x + ACTION_DELTAS[actions, 0]
        ny_ = y + ACTION_DELTAS[actions, 1]
        inside = (nx_ >= 0) & (nx_ < self.side) & (ny_ >= 0) & (ny_ < self.side)
        moved = np.where(inside, ny_ * self.side + nx_, cells)
        return int(moved) if moved.ndim == 0 else moved

    def follow(self, cell: int, sequence: Tuple[int, ...]) -> Tuple[int, ...]:
        """沿动作序列逐步移动，返回每一步之后的位置"""
        path = []
        for action in sequence:
            cell = self.move(cell, action)
            path.append(cell)
        return tuple(path)

    def distance(self, a: int, b: int) -> float:
        return float(np.linalg.norm(self.coords[a] - self.coords[b]))

    def distances_from(self, cell: int) -> np.ndarray:
        """该格到所有格子的欧氏距离"""
        return _distances(self.side, int(cell))


@lru_cache(maxsize=4096)
def _distances(side: int, cell: int) -> np.ndarray:
    y, x = divmod(cell, side)
    ys, xs = np.divmod(np.arange(side * side), side)
    d = np.hypot(xs - x, ys - y)
    d.setflags(write=False)
    return d


# ============观测模型===============

def range_mean_var(distance):
    """测距均值 d̂ = min(d, 20)，方差 0.25 + 0.5 d̂²"""
    mean = np.minimum(distance, SwarmConfig.TRACKING.RANGE_SATURATION)
    var = SwarmConfig.TRACKING.RANGE_VARIANCE_BASE + SwarmConfig.TRACKING.RANGE_VARIANCE_SCALE * mean ** 2
    return mean, var


def target_step(cell: int, world: GridWorld, rng: np.random.Generator) -> int:
    """随机游走一步：5 个动作均匀，越界则停留"""
    world.check_cell(cell)
    return world.move(cell, int(rng.integers(N_ACTIONS)))


def range_measurement(robot_cell: int, target_cell: int, rng: np.random.Generator,
                      world: GridWorld) -> float:
    """y ~ Normal(d̂, 0.25 + 0.5 d̂²)"""
    mean, var = range_mean_var(world.distance(robot_cell, target_cell))
    return float(rng.normal(mean, math.sqrt(var)))
