from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import SwarmConfig


class ScenarioFamily(str, Enum):
    """基准问题族"""
    AREA_COVERAGE = "area_coverage"
    PROB_SENSING = "prob_sensing"
    TRACKING = "tracking"


class MixtureSpec(BaseModel):
    """事件位置的高斯混合分布（等方差各向同性分量）"""
    model_config = ConfigDict(frozen=True)

    means: Tuple[Tuple[float, float], ...] = Field(
        default=SwarmConfig.SCENARIO.MIXTURE_MEANS, description="各分量均值")
    sigma: float = Field(default=SwarmConfig.SCENARIO.MIXTURE_SIGMA, gt=0, description="各分量标准差")
    weights: Tuple[float, ...] = Field(default=SwarmConfig.SCENARIO.MIXTURE_WEIGHTS, description="分量权重")

    @model_validator(mode='after')
    def _check_components(self) -> 'MixtureSpec':
        if len(self.means) != len(self.weights):
            raise ValueError("mixture means and weights differ in length")
        if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
            raise ValueError("mixture weights must be non-negative with positive sum")
        return self


class ScenarioConfig(BaseModel):
    """场景生成参数"""
    model_config = ConfigDict(frozen=True)

    family: ScenarioFamily
    n_agents: int = Field(..., ge=1)
    seed: int = 0
    overrides: Dict[str, Any] = Field(default_factory=dict, description="覆盖默认参数，例如 mixture、actions_per_agent")


class ExperimentConfig(BaseModel):
    """实验配置文件（JSON）

    命令行参数优先于文件；seed 依次回退到环境变量 SUBMOD_SWARM_SEED 与 0。
    """
    model_config = ConfigDict(extra='forbid')

    family: ScenarioFamily
    n_agents: List[int] = Field(default_factory=lambda: [50], description="一个或多个规模")
    trials: int = Field(default=1, ge=1)
    seed: int = 0
    solver: List[str] = Field(default_factory=lambda: ["sequential"], description="求解器描述串列表")
    overrides: Dict[str, Any] = Field(default_factory=dict)
    jobs: Optional[int] = Field(default=None, ge=1)
    rounds: Optional[int] = Field(default=None, ge=1)
    gamma: Optional[float] = Field(default=None, gt=0)
    comm_range: Optional[float] = Field(default=None, gt=0)
    samples: Optional[int] = Field(default=None, ge=1)

    @field_validator('n_agents', mode='before')
    @classmethod
    def _wrap_single_n(cls, value):
        return [value] if isinstance(value, int) else value

    @field_validator('solver', mode='before')
    @classmethod
    def _wrap_single_solver(cls, value):
        return [value] if isinstance(value, str) else value

    @field_validator('n_agents')
    @classmethod
    def _positive_sizes(cls, value: List[int]) -> List[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("n_agents must be a non-empty list of positive integers")
        return value

    @field_validator('solver')
    @classmethod
    def _non_empty_solvers(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one solver is required")
        return value

    def scenario(self, n_agents: int) -> ScenarioConfig:
        return ScenarioConfig(family=self.family, n_agents=n_agents, seed=self.seed, overrides=self.overrides)
