from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import SwarmConfig
from swarm.exceptions import ResultConsistencyError


class BoundReport(BaseModel):
    """一次求解结果的上界汇总（写入 bounds.csv）"""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="被评估选择的目标值")
    deleted_weight: float = Field(0.0, ge=0, description="被忽略边的冗余权重之和")
    posthoc: float = Field(..., description="2·value + deleted_weight")
    online: float = Field(..., description="value + 各智能体剩余最大边际增益之和")
    oblivious: float = Field(..., description="各智能体最佳单点值之和")
    subopt_lb: float = Field(..., description="value / min(上界)")
    alpha: Optional[float] = Field(None, description="冗余图总权重 / 最佳已知值，仅作描述")

    @model_validator(mode='after')
    def _bounds_dominate_value(self) -> 'BoundReport':
        tol = 1e-9 * max(1.0, abs(self.value))
        for name in ('posthoc', 'online', 'oblivious'):
            if getattr(self, name) < self.value - tol:
                raise ValueError(f"{name} bound {getattr(self, name)} below value {self.value}")
        return self


class MessageStats(BaseModel):
    """一次求解的通信统计（跳数计的消息数、决策×跳数的通信量、顺序传输链长度）"""
    model_config = ConfigDict(frozen=True)

    messages: int = Field(..., ge=0)
    volume: int = Field(..., ge=0)
    span: int = Field(..., ge=0)
    broadcast_messages: Optional[int] = Field(None, ge=0, description="向全部邻居广播时的消息数（含末轮浪费）")
    rounds: int = Field(0, ge=0)

    @property
    def volume_bytes(self) -> int:
        return self.volume * SwarmConfig.NETSIM.DECISION_BYTES


class EpochStats(BaseModel):
    """同步周期仿真的消息接收统计"""
    model_config = ConfigDict(frozen=True)

    n_agents: int
    n_rounds: int
    epochs: int
    sent: int
    accepted: int
    acceptance_rate: float
    nominal_rate: float = Field(..., description="(1/2)(1 - 1/n_d)")
    standard_error: float
    sent_before_final_round: int
    acceptance_rate_excluding_final: float


class TrialRecord(BaseModel):
    """单次试验、单个求解器的结果行（results.csv）"""
    family: str
    n_agents: int
    trial: int
    seed: int
    solver: str
    objective: float
    rounds_used: int
    converged: bool = True
    psi: Optional[float] = None
    planning_evals: int = 0
    weight_per_robot: Optional[float] = None


class TrackingStepRecord(BaseModel):
    """跟踪试验的逐步记录"""
    trial: int
    step: int
    solver: str
    n_robots: int
    mean_entropy_bits: float
    objective: float
    planning_evals: int
    seed: int = 0


class TrackingStepBound(BaseModel):
    """跟踪试验单步规划的上界

    蒙特卡洛目标不保证次可加，不记录无关界；事后界与在线界对任意非负增益都不低于目标值。
    """
    model_config = ConfigDict(frozen=True)

    step: int = Field(..., ge=1)
    value: float
    deleted_weight: float = Field(0.0, ge=0)
    posthoc: float
    online: float

    @model_validator(mode='after')
    def _bounds_dominate_value(self) -> 'TrackingStepBound':
        tol = 1e-9 * max(1.0, abs(self.value))
        if min(self.posthoc, self.online) < self.value - tol:
            raise ValueError(f"step {self.step} bounds fall below value {self.value}")
        return self


class RunSummary(BaseModel):
    """按 (solver, n_agents) 聚合的均值/标准差/标准误"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: List[TrialRecord]
    value_column: str = "objective"

    def aggregate(self) -> pd.DataFrame:
        frame = pd.DataFrame([r.model_dump() for r in self.rows])
        return aggregate_frame(frame, self.value_column)

    def check_consistency(self, aggregate: pd.DataFrame, tol: float = 1e-9) -> bool:
        """聚合表能否由逐行数据重新算出"""
        recomputed = self.aggregate()
        if len(recomputed) != len(aggregate):
            return False
        merged = recomputed.merge(aggregate, on=['solver', 'n_agents'], suffixes=('', '_given'))
        if len(merged) != len(recomputed):
            return False
        if not (merged['count'].to_numpy() == merged['count_given'].to_numpy()).all():
            return False
        for column in ('mean', 'std', 'stderr'):
            a = merged[column].to_numpy(dtype=float)
            b = merged[f'{column}_given'].to_numpy(dtype=float)
            if not np.allclose(np.nan_to_num(a), np.nan_to_num(b), atol=tol, rtol=0):
                return False
        return True

    def verify(self, aggregate: pd.DataFrame, tol: float = 1e-9) -> None:
        if not self.check_consistency(aggregate, tol):
            raise ResultConsistencyError("summary cannot be recomputed from the result rows")


def aggregate_frame(frame: pd.DataFrame, value_column: str = "objective") -> pd.DataFrame:
    """按 (solver, n_agents) 聚合某一列"""
    grouped = frame.groupby(['solver', 'n_agents'], sort=True)[value_column]
    summary = grouped.agg(['count', 'mean', 'std']).reset_index()
    summary['std'] = summary['std'].fillna(0.0)
    summary['stderr'] = summary['std'] / np.sqrt(summary['count'])
    return summary


class CheckOutcome(BaseModel):
    """小规模核对的一行结果（tinycheck 表格）"""
    name: str
    cases: int = Field(..., ge=0)
    failures: int = Field(..., ge=0)
    worst_violation: float = Field(0.0, description="最大违反量，≤ 容差视为通过")
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0
