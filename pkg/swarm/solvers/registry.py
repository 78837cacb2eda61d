# swarm/solvers/registry.py
"""求解器描述串 → 规划器

支持的描述串：
    random | myopic | sequential | general
    dsga:<n_d>[:noreplan]
    rsp:<n_d> | rsp:global[:<gamma>] | rsp:local[:<gamma>]
    rrsp:<n_d>[:<r_c>] | rrsp:global[:<gamma>[:<r_c>]] | rrsp:local[:<gamma>[:<r_c>]]
    auction:global[:<rounds>] | auction:local[:<rounds>]

省略的 γ、r_c 取自场景上下文。
"""
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional

import numpy as np

from swarm.exceptions import ConfigError, InvalidArgumentError
from swarm.models.selection_model import SimplePartitionMatroid
from swarm.netsim.comm_graph import CommGraph
from swarm.setfun.set_function import CountingObjective, SetObjective
from swarm.solvers.auction import global_auction, local_auction
from swarm.solvers.base_solver import LocalObjective, SolveResult, SolverConfig
from swarm.solvers.dsga import dsga_plan
from swarm.solvers.greedy import general_greedy, myopic_plan, random_plan, sequential_greedy
from swarm.solvers.rsp import RoundPolicy, rrsp_plan, rsp_plan
from utils.logger_handler import AppLogger

SIMPLE_FAMILIES = ("random", "myopic", "sequential", "general")


@dataclass(frozen=True)
class SolverSpec:
    """解析后的求解器描述"""
    text: str
    family: str
    n_d: Optional[int] = None
    variant: str = "fixed"
    gamma: Optional[float] = None
    r_c: Optional[float] = None
    rounds: Optional[int] = None
    replan: bool = True

    def policy(self, default_gamma: Optional[float]) -> RoundPolicy:
        if self.variant == "fixed":
            return RoundPolicy.fixed(self.n_d)
        gamma = self.gamma if self.gamma is not None else default_gamma
        if gamma is None:
            raise ConfigError(f"solver '{self.text}' needs gamma (as a solver field or via --gamma)")
        if self.variant == "global":
            return RoundPolicy.global_adaptive(gamma)
        return RoundPolicy.local_adaptive(gamma)


def _int(text: str, token: str, minimum: int = 1) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ConfigError(f"solver '{text}': '{token}' is not an integer")
    if value < minimum:
        raise ConfigError(f"solver '{text}': {value} must be >= {minimum}")
    return value


def _positive(text: str, token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ConfigError(f"solver '{text}': '{token}' is not a number")
    if not value > 0:
        raise ConfigError(f"solver '{text}': {value} must be positive")
    return value


def _parse_partition(text: str, family: str, args: List[str]) -> SolverSpec:
    """rsp / rrsp 的参数：固定轮数或自适应策略，rrsp 额外可带 r_c"""
    if not args:
        raise ConfigError(f"solver '{text}' needs a round count or an adaptive policy")
    max_args = 2 if family == "rsp" else 3
    if args[0] in ("global", "local"):
        if len(args) > max_args:
            raise ConfigError(f"solver '{text}' has too many fields")
        gamma = _positive(text, args[1]) if len(args) > 1 else None
        r_c = _positive(text, args[2]) if len(args) > 2 else None
        return SolverSpec(text, family, variant=args[0], gamma=gamma, r_c=r_c)
    if len(args) > max_args - 1:
        raise ConfigError(f"solver '{text}' has too many fields")
    r_c = _positive(text, args[1]) if len(args) > 1 else None
    return SolverSpec(text, family, n_d=_int(text, args[0]), r_c=r_c)


def parse_solver_spec(text: str) -> SolverSpec:
    """解析求解器描述串，格式错误抛 ConfigError"""
    if not isinstance(text, str) or not text.strip():
        raise ConfigError("solver spec must be a non-empty string")
    text = text.strip()
    family, *args = text.lower().split(":")

    if family in SIMPLE_FAMILIES:
        if args:
            raise ConfigError(f"solver '{text}' takes no parameters")
        return SolverSpec(text, family)

    if family == "dsga":
        if not args or len(args) > 2 or (len(args) == 2 and args[1] != "noreplan"):
            raise ConfigError(f"solver '{text}' must look like dsga:<n_d>[:noreplan]")
        return SolverSpec(text, family, n_d=_int(text, args[0]), replan=len(args) == 1)

    if family in ("rsp", "rrsp"):
        return _parse_partition(text, family, args)

    if family == "auction":
        if not args or args[0] not in ("global", "local") or len(args) > 2:
            raise ConfigError(f"solver '{text}' must look like auction:global|local[:<rounds>]")
        rounds = _int(text, args[1]) if len(args) == 2 else None
        return SolverSpec(text, family, variant=args[0], rounds=rounds)

    raise ConfigError(f"unknown solver '{text}'")


# ============求解上下文===============

@dataclass
class SolverContext:
    """一个场景实例上运行求解器所需的全部输入

    Attributes:
        objective: 目标函数
        matroid: 划分拟阵
        positions: 智能体位置（rrsp 与拍卖的通信图需要）
        comm_range: 默认通信半径
        gamma: 自适应轮数策略的默认 γ
        comm_graph: 拍卖使用的通信图，缺省时由 positions 与 comm_range 构造
        weights: 惰性计算冗余权重的回调（自适应策略需要）
        local_objective: rrsp 的本地近似目标 f̃_i
    """
    objective: SetObjective
    matroid: SimplePartitionMatroid
    positions: Optional[np.ndarray] = None
    comm_range: Optional[float] = None
    gamma: Optional[float] = None
    comm_graph: Optional[Any] = None
    weights: Optional[Callable[[], Any]] = None
    local_objective: Optional[LocalObjective] = None
    _weights_cache: Any = field(default=None, init=False, repr=False)

    def redundancy_weights(self) -> Any:
        if self._weights_cache is None:
            if self.weights is None:
                raise ConfigError("adaptive round policies need redundancy weights for this scenario")
            self._weights_cache = self.weights()
        return self._weights_cache

    def resolve_comm_graph(self, r_c: Optional[float] = None):
        if self.comm_graph is not None and r_c is None:
            return self.comm_graph
        r_c = r_c if r_c is not None else self.comm_range
        if self.positions is None or r_c is None:
            return CommGraph.complete(self.matroid.n_agents)
        return CommGraph(self.positions, r_c)


def run_solver(spec, context: SolverContext, rng: np.random.Generator,
               config: Optional[SolverConfig] = None) -> SolveResult:
    """按描述运行一个求解器；eval_count 记录规划期间的目标函数调用数"""
    spec = parse_solver_spec(spec) if isinstance(spec, str) else spec
    config = config or SolverConfig()
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    f = CountingObjective(context.objective)
    m = context.matroid
    local_counters: List[CountingObjective] = []

    def counted_local(agent: int) -> SetObjective:
        wrapped = CountingObjective(context.local_objective(agent))
        local_counters.append(wrapped)
        return wrapped

    logger.debug(f"运行求解器 {spec.text}（{m.n_agents} 个智能体）")

    if spec.family == "random":
        result = random_plan(m, rng, context.objective)
    elif spec.family == "myopic":
        result = myopic_plan(f, m, config)
    elif spec.family == "sequential":
        result = sequential_greedy(f, m, config=config)
    elif spec.family == "general":
        result = general_greedy(f, m, config)
    elif spec.family == "dsga":
        result = dsga_plan(f, m, spec.n_d, config, replan=spec.replan)
    elif spec.family in ("rsp", "rrsp"):
        policy = spec.policy(context.gamma)
        weights = context.redundancy_weights() if policy.is_adaptive else None
        if spec.family == "rsp":
            result = rsp_plan(f, m, policy, rng, weights, config)
        else:
            r_c = spec.r_c if spec.r_c is not None else context.comm_range
            if context.positions is None or r_c is None:
                raise ConfigError(f"solver '{spec.text}' needs agent positions and a communication range")
            result = rrsp_plan(f, m, policy, context.positions, r_c, rng, weights, config,
                               local_objective=counted_local if context.local_objective is not None else None)
    elif spec.family == "auction":
        graph = context.resolve_comm_graph()
        auction = global_auction if spec.variant == "global" else local_auction
        result = auction(f, m, graph, max_rounds=spec.rounds, config=config)
    else:
        raise InvalidArgumentError(f"unknown solver family '{spec.family}'")

    result.eval_count = f.count + sum(c.count for c in local_counters)
    result.trace.setdefault('spec', spec.text)
    return result
