# swarm/tracking/target_filter.py
"""单目标直方图贝叶斯滤波器"""
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from swarm.exceptions import InvalidArgumentError
from swarm.tracking.grid_world import GridWorld, range_mean_var
from utils.logger_handler import AppLogger

MOVE_PROB = 0.2


@dataclass(frozen=True, eq=False)
class TargetFilter:
    """网格上的目标位置分布

    Attributes:
        probs: (n_cells,) 概率，和为 1
        sparse_threshold: 更新后把小于该值的概率置零（0 表示不稀疏化）
        underflowed: 最近一次更新是否因数值下溢而退回先验
    """
    probs: np.ndarray
    sparse_threshold: float = 0.0
    underflowed: bool = False

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        if np.any(probs < 0) or not np.isclose(probs.sum(), 1.0, rtol=0, atol=1e-9):
            raise InvalidArgumentError("filter probabilities must be non-negative and sum to 1")
        if self.sparse_threshold < 0:
            raise InvalidArgumentError("sparse threshold must be non-negative")
        probs.setflags(write=False)
        object.__setattr__(self, 'probs', probs)

    @classmethod
    def point_mass(cls, world: GridWorld, cell: int, sparse_threshold: float = 0.0) -> 'TargetFilter':
        world.check_cell(cell)
        probs = np.zeros(world.n_cells)
        probs[cell] = 1.0
        return cls(probs, sparse_threshold)

    @classmethod
    def uniform(cls, world: GridWorld, sparse_threshold: float = 0.0) -> 'TargetFilter':
        return cls(np.full(world.n_cells, 1.0 / world.n_cells), sparse_threshold)

    def mean_position(self, world: GridWorld) -> np.ndarray:
        return self.probs @ world.coords

    def entropy(self) -> float:
        return filter_entropy(self)


# ============批量运算（最后一维为格子）===============

def predict_probs(probs: np.ndarray, shape) -> np.ndarray:
    """与 5 点均匀随机游走核卷积，越界的移动质量留在原格

    shape 为网格边长，或 (行数, 列数) 的矩形子网格。
    """
    rows, cols = (shape, shape) if np.isscalar(shape) else shape
    grid = probs.reshape(probs.shape[:-1] + (rows, cols))
    out = MOVE_PROB * grid
    # 北 (+y)
    out[..., 1:, :] += MOVE_PROB * grid[..., :-1, :]
    out[..., -1, :] += MOVE_PROB * grid[..., -1, :]
    # 南 (-y)
    out[..., :-1, :] += MOVE_PROB * grid[..., 1:, :]
    out[..., 0, :] += MOVE_PROB * grid[..., 0, :]
    # 东 (+x)
    out[..., :, 1:] += MOVE_PROB * grid[..., :, :-1]
    out[..., :, -1] += MOVE_PROB * grid[..., :, -1]
    # 西 (-x)
    out[..., :, :-1] += MOVE_PROB * grid[..., :, 1:]
    out[..., :, 0] += MOVE_PROB * grid[..., :, 0]
    return out.reshape(probs.shape)


def range_likelihood(world: GridWorld, robot_cell: int, measurements) -> np.ndarray:
    """p(y | 目标在各格)，形状 measurements.shape + (n_cells,)"""
    mean, var = range_mean_var(world.distances_from(robot_cell))
    y = np.asarray(measurements, dtype=float)[..., None]
    return norm.pdf(y, loc=mean, scale=np.sqrt(var))


def normalize_rows(posterior: np.ndarray, fallback: np.ndarray, sparse_threshold: float):
    """按行归一化并稀疏化；和为 0 的行退回 fallback。返回 (结果, 是否有行下溢)"""
    total = posterior.sum(axis=-1, keepdims=True)
    bad = ~(np.isfinite(total) & (total > 0))
    safe = np.where(bad, 1.0, total)
    out = np.where(bad, fallback, posterior / safe)
    if sparse_threshold > 0:
        thresholded = np.where(out < sparse_threshold, 0.0, out)
        kept = thresholded.sum(axis=-1, keepdims=True)
        # 全部被截断时保留未截断的分布
        out = np.where(kept > 0, thresholded / np.where(kept > 0, kept, 1.0), out)
    return out, bool(np.any(bad))


def entropy_bits(probs: np.ndarray) -> np.ndarray:
    """沿最后一维的熵（比特）"""
    p = np.asarray(probs, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


# ============单个滤波器===============

def filter_predict(f: TargetFilter, world: GridWorld) -> TargetFilter:
    predicted = predict_probs(f.probs, world.side)
    return replace(f, probs=predicted / predicted.sum(), underflowed=False)


def filter_update(f: TargetFilter, world: GridWorld, robot_cell: int, measurement: float) -> TargetFilter:
    """Bayes 更新；后验全为 0 时退回先验并置 underflowed"""
    world.check_cell(robot_cell)
    posterior = f.probs * range_likelihood(world, robot_cell, measurement)
    probs, underflowed = normalize_rows(posterior, f.probs, f.sparse_threshold)
    if underflowed:
        logger = AppLogger.get_logger(__name__, app_name='swarm')
        logger.warning(f"滤波器更新下溢（机器人 {robot_cell}，观测 {measurement:.3f}），退回先验")
    return replace(f, probs=probs, underflowed=underflowed)


def filter_entropy(f: TargetFilter) -> float:
    """Σ −p log₂ p"""
    return float(entropy_bits(f.probs))
