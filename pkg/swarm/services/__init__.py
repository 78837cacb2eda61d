from .base_service import BaseService
from .experiment_service import (
    ExperimentMode, ExperimentServiceConfig, ExperimentService, ExperimentArtifacts,
    TrialJob, TrialOutput, run_trial_job, resolve_solver_texts, scenario_rng, solver_rng,
)
from .compare_service import CompareServiceConfig, CompareService, load_runs, compare_runs, summarize_comparison
from .tinycheck_service import TinycheckConfig, TinycheckService, SignFlippedCoverage, exit_code_for, outcome_table

__all__ = [
    'BaseService',
    'ExperimentMode', 'ExperimentServiceConfig', 'ExperimentService', 'ExperimentArtifacts',
    'TrialJob', 'TrialOutput', 'run_trial_job', 'resolve_solver_texts', 'scenario_rng', 'solver_rng',
    'CompareServiceConfig', 'CompareService', 'load_runs', 'compare_runs', 'summarize_comparison',
    'TinycheckConfig', 'TinycheckService', 'SignFlippedCoverage', 'exit_code_for', 'outcome_table',
]
