from .grid_world import GridWorld, grid_side, action_sequences, target_step, range_measurement, range_mean_var
from .target_filter import TargetFilter, filter_predict, filter_update, filter_entropy
from .tracking_objective import TrackingNoise, TrackingObjective, TrackingObjectiveView
from .robot_planner import plan_single_robot
from .tracking_trial import TrackingConfig, TrackingScenario, TrackingTrialResult, run_tracking_trial

__all__ = [
    'GridWorld', 'grid_side', 'action_sequences', 'target_step', 'range_measurement', 'range_mean_var',
    'TargetFilter', 'filter_predict', 'filter_update', 'filter_entropy',
    'TrackingNoise', 'TrackingObjective', 'TrackingObjectiveView',
    'plan_single_robot',
    'TrackingConfig', 'TrackingScenario', 'TrackingTrialResult', 'run_tracking_trial',
]
