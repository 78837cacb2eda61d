# swarm/services/tinycheck_service.py
"""小规模穷举核对服务：在随机概率覆盖实例上运行全部核对并输出通过/失败表"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from swarm.models.result_model import CheckOutcome
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.objectives.coverage import ProbCoverageObjective
from swarm.redundancy.checks import DEFAULT_TOLERANCE, InstanceFactory, run_all_checks
from swarm.scenarios.generators import gen_random_prob_coverage
from swarm.services.base_service import BaseService

MAX_EXIT_CODE = 125


@dataclass
class TinycheckConfig:
    """核对配置

    Attributes:
        cases: 每项核对的随机实例数
        seed: 实例生成种子
        tolerance: 数值容差
        mutant: 使用符号翻转的覆盖目标（用来确认核对能发现错误实现）
    """
    cases: int = 200
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    mutant: bool = False

    def __post_init__(self):
        if self.cases < 1:
            raise ValueError("cases must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


class SignFlippedCoverage(ProbCoverageObjective):
    """概率覆盖取负号后的错误实现：单调递减且超模"""

    def evaluate(self, selection: Selection) -> float:
        return -super().evaluate(selection)

    def marginal_gains(self, candidates: Sequence[GroundElement], base: Selection) -> np.ndarray:
        return -super().marginal_gains(candidates, base)

    def event_components(self) -> List['SignFlippedCoverage']:
        return [SignFlippedCoverage(c.problem) for c in super().event_components()]


def coverage_instances(rng: np.random.Generator) -> Tuple[ProbCoverageObjective, SimplePartitionMatroid]:
    return gen_random_prob_coverage(rng)


def mutant_instances(rng: np.random.Generator) -> Tuple[SignFlippedCoverage, SimplePartitionMatroid]:
    f, m = gen_random_prob_coverage(rng)
    return SignFlippedCoverage(f.problem), m


def outcome_table(outcomes: Sequence[CheckOutcome]) -> pd.DataFrame:
    table = pd.DataFrame([o.model_dump() for o in outcomes])
    table.insert(1, 'status', ['PASS' if o.passed else 'FAIL' for o in outcomes])
    return table


def exit_code_for(outcomes: Sequence[CheckOutcome]) -> int:
    """退出码 = 失败实例总数，上限 125"""
    return min(sum(o.failures for o in outcomes), MAX_EXIT_CODE)


class TinycheckService(BaseService):
    """运行全部核对；run() 返回各项结果，exit_code() 给出命令行退出码"""

    def __init__(self, config: TinycheckConfig = None):
        super().__init__(config or TinycheckConfig(), __name__)
        self.outcomes: List[CheckOutcome] = []

    @property
    def factory(self) -> InstanceFactory:
        return mutant_instances if self.config.mutant else coverage_instances

    def run(self) -> List[CheckOutcome]:
        rng = np.random.default_rng(self.config.seed)
        self.logger.info(f"运行小规模核对：每项 {self.config.cases} 个实例，mutant={self.config.mutant}")
        self.outcomes = run_all_checks(self.factory, rng, self.config.cases, self.config.tolerance)
        return self.outcomes

    def report(self) -> str:
        return outcome_table(self.outcomes).to_string(index=False)

    def exit_code(self) -> int:
        return exit_code_for(self.outcomes)
