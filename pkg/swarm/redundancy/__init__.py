from .redundancy_graph import (
    RedundancyGraph, pairwise_weight, redundancy_graph, capacity_matrix, capacity_weights,
    check_sum_decomposition,
)
from .bounds import (
    DAG_GREEDY_FAMILIES, deleted_edge_weight, posthoc_bound, online_bounds, dsga_psi, alpha_estimate,
    distributed_costs, planner_costs, posthoc_cost_bound, posthoc_terms, bound_report,
)
from .checks import CHECKS, random_disjoint_sets, run_check, run_all_checks

__all__ = [
    'RedundancyGraph', 'pairwise_weight', 'redundancy_graph', 'capacity_matrix', 'capacity_weights',
    'check_sum_decomposition',
    'DAG_GREEDY_FAMILIES', 'deleted_edge_weight', 'posthoc_bound', 'online_bounds', 'dsga_psi', 'alpha_estimate',
    'distributed_costs', 'planner_costs', 'posthoc_cost_bound', 'posthoc_terms', 'bound_report',
    'CHECKS', 'random_disjoint_sets', 'run_check', 'run_all_checks',
]
