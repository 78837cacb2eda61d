from .base_solver import SolverConfig, PlannerDag, SolveResult, block_argmax, dag_greedy
from .greedy import sequential_greedy, general_greedy, myopic_plan, random_plan, greedy_over
from .rsp import RoundPolicy, RoundVariant, round_counts, rsp_assign_rounds, rsp_dag, rsp_plan, rrsp_plan
from .dsga import DsgaCommit, dsga_plan
from .auction import global_auction, local_auction
from .registry import SolverSpec, SolverContext, parse_solver_spec, run_solver

__all__ = [
    'SolverConfig', 'PlannerDag', 'SolveResult', 'block_argmax', 'dag_greedy',
    'sequential_greedy', 'general_greedy', 'myopic_plan', 'random_plan', 'greedy_over',
    'RoundPolicy', 'RoundVariant', 'round_counts', 'rsp_assign_rounds', 'rsp_dag', 'rsp_plan', 'rrsp_plan',
    'DsgaCommit', 'dsga_plan',
    'global_auction', 'local_auction',
    'SolverSpec', 'SolverContext', 'parse_solver_spec', 'run_solver',
]
