from .comm_graph import CommGraph, gen_connected_positions
from .message_accounting import account_solver_messages
from .epoch_sim import LatencyModel, EpochSimConfig, nominal_acceptance_rate, sync_epoch_sim

__all__ = [
    'CommGraph', 'gen_connected_positions', 'account_solver_messages',
    'LatencyModel', 'EpochSimConfig', 'nominal_acceptance_rate', 'sync_epoch_sim',
]
