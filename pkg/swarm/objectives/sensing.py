# swarm/objectives/sensing.py
from typing import Union

import numpy as np

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError

ArrayLike = Union[float, np.ndarray]


def detection_success_prob(distance: ArrayLike, r_s: float,
                           radius_power: float = SwarmConfig.OBJECTIVE.DETECTION_RADIUS_POWER) -> ArrayLike:
    """检测成功概率 exp(−d² / r_s^p)，默认 p = 4

    p = 4 时有效检测尺度约为 r_s² 而不是 r_s；需要"软边缘圆盘"语义时可令 p = 2。
    """
    if r_s <= 0:
        raise InvalidArgumentError(f"sensor radius must be positive, got {r_s}")
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise InvalidArgumentError("distance must be non-negative")
    # 远处传感器的概率下溢为 0
    with np.errstate(under='ignore'):
        prob = np.exp(-d ** 2 / r_s ** radius_power)
    return float(prob) if prob.ndim == 0 else prob
