# swarm/netsim/epoch_sim.py
"""同步分布式 RSP 的周期时钟仿真

每个周期内智能体各自抽取轮次 d_i，在第 d_i 轮结束时广播决策；
接收者只在自己的轮次开始前收到的、来自更早轮次的决策才会被采用。
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from swarm.models.result_model import EpochStats
from utils.logger_handler import AppLogger


@dataclass(frozen=True)
class LatencyModel:
    """固定时延模型；delay=0 即可靠且瞬时的传输

    Attributes:
        delay: 消息传输时延
        round_duration: 每轮时长 T
    """
    delay: float = 0.0
    round_duration: float = 1.0

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        if not self.round_duration > 0:
            raise ValueError("round_duration must be positive")

    def accepts(self, sender_round: np.ndarray, receiver_round: np.ndarray) -> np.ndarray:
        """发送者第 d_i 轮结束时发出，需在接收者第 d_j 轮开始前到达"""
        arrival = sender_round * self.round_duration + self.delay
        return arrival <= (receiver_round - 1) * self.round_duration + 1e-12


@dataclass
class EpochSimConfig:
    """周期仿真配置"""
    n_agents: int
    n_rounds: int
    epochs: int

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be at least 1")
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be at least 1")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")


def nominal_acceptance_rate(n_d: int) -> float:
    """零时延下的名义接收率 (1/2)(1 − 1/n_d)"""
    return 0.5 * (1.0 - 1.0 / n_d)


def sync_epoch_sim(n: int, n_d: int, epochs: int,
                   latency_model: Optional[LatencyModel] = None,
                   rng: Optional[np.random.Generator] = None) -> EpochStats:
    """在完全通信图上仿真若干周期，统计决策消息的接收率

    标准误由逐周期接收率的样本标准差给出。
    """
    config = EpochSimConfig(n, n_d, epochs)
    latency_model = latency_model or LatencyModel()
    rng = rng if rng is not None else np.random.default_rng()
    logger = AppLogger.get_logger(__name__, app_name='swarm')

    off_diagonal = ~np.eye(config.n_agents, dtype=bool)
    sent = accepted = sent_early = accepted_early = 0
    per_epoch = np.zeros(config.epochs)
    for epoch in range(config.epochs):
        rounds = rng.integers(1, config.n_rounds + 1, size=config.n_agents)
        ok = latency_model.accepts(rounds[:, None], rounds[None, :]) & off_diagonal
        early = (rounds < config.n_rounds)[:, None] & off_diagonal
        epoch_sent = int(off_diagonal.sum())
        epoch_accepted = int(ok.sum())
        sent += epoch_sent
        accepted += epoch_accepted
        sent_early += int(early.sum())
        accepted_early += int((ok & early).sum())
        per_epoch[epoch] = epoch_accepted / epoch_sent if epoch_sent else 0.0

    rate = accepted / sent if sent else 0.0
    standard_error = float(per_epoch.std(ddof=1) / np.sqrt(config.epochs)) if config.epochs > 1 else 0.0
    logger.debug(f"周期仿真 n={n} n_d={n_d}：{accepted}/{sent} 条消息被接收")
    return EpochStats(
        n_agents=config.n_agents,
        n_rounds=config.n_rounds,
        epochs=config.epochs,
        sent=sent,
        accepted=accepted,
        acceptance_rate=rate,
        nominal_rate=nominal_acceptance_rate(config.n_rounds),
        standard_error=standard_error,
        sent_before_final_round=sent_early,
        acceptance_rate_excluding_final=accepted_early / sent_early if sent_early else 0.0,
    )
