from .selection_model import GroundElement, Selection, SimplePartitionMatroid
from .result_model import (
    BoundReport, MessageStats, EpochStats, TrialRecord, TrackingStepRecord, TrackingStepBound, RunSummary, CheckOutcome,
    aggregate_frame,
)
from .config_model import ScenarioFamily, MixtureSpec, ScenarioConfig, ExperimentConfig

__all__ = [
    'GroundElement', 'Selection', 'SimplePartitionMatroid',
    'BoundReport', 'MessageStats', 'EpochStats', 'TrialRecord', 'TrackingStepRecord', 'TrackingStepBound', 'RunSummary',
    'CheckOutcome', 'aggregate_frame',
    'ScenarioFamily', 'MixtureSpec', 'ScenarioConfig', 'ExperimentConfig',
]
