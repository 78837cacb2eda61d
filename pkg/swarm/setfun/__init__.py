from .set_function import (
    SetObjective, CountingObjective, marginal_gain, derivative, second_derivative,
    matroid_feasible, brute_force_optimum, best_index,
)

__all__ = [
    'SetObjective', 'CountingObjective', 'marginal_gain', 'derivative', 'second_derivative',
    'matroid_feasible', 'brute_force_optimum', 'best_index',
]
