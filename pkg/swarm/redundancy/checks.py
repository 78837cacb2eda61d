# swarm/redundancy/checks.py
"""小规模实例上的穷举核对

每个核对在随机实例上计算"违反量"（应 ≤ 容差），统计超出容差的实例数。
实例由调用方提供的工厂 instance_factory(rng) -> (f, m) 生成，
因此同一组核对也能跑在故意写错的目标函数上（变异测试）。
"""
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np

from swarm.exceptions import SwarmError
from swarm.models.result_model import CheckOutcome
from swarm.models.selection_model import GroundElement, Selection, SimplePartitionMatroid
from swarm.redundancy.bounds import dsga_psi, posthoc_bound, posthoc_cost_bound
from swarm.redundancy.redundancy_graph import capacity_weights, redundancy_graph
from swarm.setfun.set_function import SetObjective, brute_force_optimum, derivative, second_derivative
from swarm.solvers.dsga import dsga_plan
from swarm.solvers.greedy import sequential_greedy
from swarm.solvers.rsp import RoundPolicy, rsp_plan
from utils.logger_handler import AppLogger

InstanceFactory = Callable[[np.random.Generator], Tuple[SetObjective, SimplePartitionMatroid]]
CaseCheck = Callable[[SetObjective, SimplePartitionMatroid, np.random.Generator], float]

DEFAULT_TOLERANCE = 1e-9


# ============1. 通用驱动===============

def run_check(name: str, case: CaseCheck, factory: InstanceFactory, rng: np.random.Generator,
              cases: int, tol: float = DEFAULT_TOLERANCE) -> CheckOutcome:
    """在 cases 个随机实例上运行一个核对

    业务异常（例如求和分解不成立）记为失败而不是中断整组核对。
    """
    logger = AppLogger.get_logger(__name__, app_name='swarm')
    failures, worst, detail = 0, 0.0, ""
    for _ in range(cases):
        f, m = factory(rng)
        try:
            violation = float(case(f, m, rng))
        except SwarmError as e:
            failures += 1
            detail = detail or str(e)
            continue
        worst = max(worst, violation)
        if violation > tol:
            failures += 1
    if failures:
        logger.warning(f"核对 {name} 失败 {failures}/{cases}，最大违反量 {worst:.3e}")
    return CheckOutcome(name=name, cases=cases, failures=failures, worst_violation=worst, detail=detail)


def ground_elements(m: SimplePartitionMatroid) -> List[GroundElement]:
    return [x for i in range(m.n_agents) for x in m.block(i)]


def random_disjoint_sets(m: SimplePartitionMatroid, rng: np.random.Generator,
                         count: int) -> List[Selection]:
    """把地集随机打乱后切成 count 个互不相交的子集（可为空）"""
    elements = ground_elements(m)
    order = rng.permutation(len(elements))
    labels = rng.integers(0, count + 1, size=len(elements))  # 标签 count 表示不选
    groups: List[List[GroundElement]] = [[] for _ in range(count)]
    for k in order:
        if labels[k] < count:
            groups[labels[k]].append(elements[k])
    return [Selection(tuple(g)) for g in groups]


# ============2. 规划器的近似保证===============

def half_optimal_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """顺序贪心不低于最优值的一半"""
    _, best = brute_force_optimum(f, m)
    return 0.5 * best - sequential_greedy(f, m).value


def deleted_edge_bound_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """随机轮数的 RSP：最优值 ≤ 2f + 删除边权重，也 ≤ 2f + Σ 分布式代价"""
    _, best = brute_force_optimum(f, m)
    n_d = int(rng.integers(1, m.n_agents + 1))
    result = rsp_plan(f, m, RoundPolicy.fixed(n_d), rng)
    graph = redundancy_graph(f, m)
    return max(best - posthoc_bound(result, graph), best - posthoc_cost_bound(f, result))


def dsga_psi_bound_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """DSGA：最优值 ≤ 2f + ψ"""
    _, best = brute_force_optimum(f, m)
    n_d = int(rng.integers(1, m.n_agents + 1))
    result = dsga_plan(f, m, n_d, replan=bool(rng.integers(2)))
    return best - (2.0 * result.value + dsga_psi(result))


def dsga_worst_case_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """顺序贪心 ≤ (1 + ⌈n_a/n_d⌉)·DSGA"""
    n_d = int(rng.integers(1, m.n_agents + 1))
    result = dsga_plan(f, m, n_d)
    return sequential_greedy(f, m).value - (1 + math.ceil(m.n_agents / n_d)) * result.value


# ============3. 目标函数性质===============

def chain_rule_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """f(Y|X) = Σ_k f(y_k | X, y_1..y_{k−1})"""
    xs, ys = random_disjoint_sets(m, rng, 2)
    total, base = 0.0, xs
    for y in ys:
        total += derivative(f, [y], base)
        base = base.add(y)
    return abs(derivative(f, ys, xs) - total)


def pairwise_redundancy_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """f(A|B,C) − f(A|C) ≥ Σ_{b∈B} [f(A|b) − f(A)]"""
    a, b, c = random_disjoint_sets(m, rng, 3)
    lhs = derivative(f, a, c.union(b)) - derivative(f, a, c)
    empty = Selection()
    rhs = sum(derivative(f, a, Selection((y,))) - derivative(f, a, empty) for y in b)
    return rhs - lhs


def _two_outside(m: SimplePartitionMatroid, rng: np.random.Generator, base: Selection):
    outside = [x for x in ground_elements(m) if x not in base]
    if len(outside) < 2:
        return None
    i, j = rng.choice(len(outside), size=2, replace=False)
    return outside[int(i)], outside[int(j)]


def monotone_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """所有一阶导数非负"""
    (base,) = random_disjoint_sets(m, rng, 1)
    outside = [x for x in ground_elements(m) if x not in base]
    if not outside:
        return 0.0
    return float(-np.min(f.marginal_gains(outside, base)))


def submodular_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """二阶导数非正"""
    (base,) = random_disjoint_sets(m, rng, 1)
    pair = _two_outside(m, rng, base)
    if pair is None:
        return 0.0
    return second_derivative(f, pair[0], pair[1], base)


def three_increasing_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """C ⊆ D 时 f(a;b|C) ≤ f(a;b|D)"""
    small, extra = random_disjoint_sets(m, rng, 2)
    large = small.union(extra)
    pair = _two_outside(m, rng, large)
    if pair is None:
        return 0.0
    return second_derivative(f, pair[0], pair[1], small) - second_derivative(f, pair[0], pair[1], large)


def capacity_dominance_case(f: SetObjective, m: SimplePartitionMatroid, rng: np.random.Generator) -> float:
    """按事件求和分解时容量权重不低于精确冗余权重"""
    exact = redundancy_graph(f, m)
    capacity = capacity_weights(f.event_components(), m, f)
    return float(np.max(exact.weights - capacity.weights)) if m.n_agents > 1 else 0.0


# ============4. 整组核对===============

CHECKS: Sequence[Tuple[str, CaseCheck]] = (
    ("half_optimal", half_optimal_case),
    ("deleted_edge_bound", deleted_edge_bound_case),
    ("dsga_psi_bound", dsga_psi_bound_case),
    ("dsga_worst_case", dsga_worst_case_case),
    ("chain_rule", chain_rule_case),
    ("pairwise_redundancy", pairwise_redundancy_case),
    ("monotone", monotone_case),
    ("submodular", submodular_case),
    ("three_increasing", three_increasing_case),
    ("capacity_dominance", capacity_dominance_case),
)


def run_all_checks(factory: InstanceFactory, rng: np.random.Generator, cases: int,
                   tol: float = DEFAULT_TOLERANCE) -> List[CheckOutcome]:
    return [run_check(name, case, factory, rng, cases, tol) for name, case in CHECKS]
