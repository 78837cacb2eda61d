from .coverage import (
    ProbCoverageProblem, ProbCoverageObjective, prob_coverage_value, weighted_coverage,
    AreaCoverageProblem, AreaCoverageObjective, area_coverage_value, prob_coverage_from_area,
)
from .sensing import detection_success_prob
from .composite import SumObjective

__all__ = [
    'ProbCoverageProblem', 'ProbCoverageObjective', 'prob_coverage_value', 'weighted_coverage',
    'AreaCoverageProblem', 'AreaCoverageObjective', 'area_coverage_value', 'prob_coverage_from_area',
    'detection_success_prob', 'SumObjective',
]
