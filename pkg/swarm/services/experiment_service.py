# swarm/services/experiment_service.py
"""实验运行服务：按 (规模, 试验) 生成场景，依次运行各求解器，写出 CSV 与 manifest"""
import dataclasses
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config import SwarmConfig
from swarm.exceptions import InvalidArgumentError, ResultConsistencyError
from swarm.models.config_model import ExperimentConfig, MixtureSpec, ScenarioFamily
from swarm.models.result_model import MessageStats, RunSummary, TrackingStepRecord, TrialRecord
from swarm.netsim.comm_graph import CommGraph
from swarm.netsim.message_accounting import account_solver_messages
from swarm.redundancy.bounds import bound_report
from swarm.scenarios.generators import CoverageScenario, gen_comm_study, gen_tracking, generate_scenario
from swarm.services.base_service import BaseService
from swarm.solvers.base_solver import SolveResult, SolverConfig
from swarm.solvers.registry import parse_solver_spec, run_solver
from swarm.tracking.tracking_trial import TrackingConfig, run_tracking_trial
from utils.io_handler import git_describe, read_csv, records_frame, write_csv, write_manifest
from utils.logger_handler import AppLogger


# ============1. 配置管理===============

class ExperimentMode(str, Enum):
    """命令行子命令对应的实验类型"""
    COVERAGE = "coverage"
    PROBSENSE = "probsense"
    TRACK = "track"
    COMMSTUDY = "commstudy"

    @property
    def family(self) -> ScenarioFamily:
        if self == ExperimentMode.PROBSENSE:
            return ScenarioFamily.PROB_SENSING
        if self == ExperimentMode.TRACK:
            return ScenarioFamily.TRACKING
        return ScenarioFamily.AREA_COVERAGE


@dataclass
class ExperimentServiceConfig:
    """实验服务配置

    Attributes:
        out_dir: 输出目录
        jobs: 试验级并行的进程数，None 取逻辑核数，1 表示在当前进程内运行
        mode: 实验类型
        compute_bounds: 是否为有删除边的结果计算冗余图（面积覆盖的大规模实验可关闭以节省时间）
        solver: 单次求解的线程与平局配置
        tracking: 跟踪试验配置
    """
    out_dir: Path = SwarmConfig.PATHS.RESULTS_DIR
    jobs: Optional[int] = None
    mode: ExperimentMode = ExperimentMode.COVERAGE
    compute_bounds: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)
    tracking: TrackingConfig = field(default_factory=TrackingConfig)

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if self.jobs is not None and self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    @property
    def workers(self) -> int:
        return self.jobs or os.cpu_count() or 1


# ============2. 单次试验（在工作进程中运行）===============

@dataclass(frozen=True)
class TrialJob:
    experiment: ExperimentConfig
    n_agents: int
    trial: int
    mode: ExperimentMode
    compute_bounds: bool
    solver: SolverConfig
    tracking: TrackingConfig


@dataclass
class TrialOutput:
    records: List[TrialRecord] = field(default_factory=list)
    bounds: List[Dict[str, Any]] = field(default_factory=list)
    messages: List[Dict[str, Any]] = field(default_factory=list)
    steps: List[TrackingStepRecord] = field(default_factory=list)


def scenario_rng(seed: int, n_agents: int, trial: int) -> np.random.Generator:
    """场景随机流只取决于 (seed, n, trial)，与求解器列表无关"""
    return np.random.default_rng([seed, n_agents, trial, 0])


def solver_rng(seed: int, n_agents: int, trial: int, solver: str) -> np.random.Generator:
    """求解器随机流按描述串区分，同一求解器在不同运行中复现相同的随机选择"""
    return np.random.default_rng([seed, n_agents, trial, 1, zlib.crc32(solver.encode('utf-8'))])


def resolve_solver_texts(solvers: List[str], rounds: Optional[int]) -> List[str]:
    """--rounds 为没有写轮数的 rsp / rrsp / dsga 补上 n_d"""
    resolved = []
    for text in solvers:
        if text.strip().lower() in ("rsp", "rrsp", "dsga") and rounds is not None:
            text = f"{text.strip()}:{rounds}"
        resolved.append(text)
    return resolved


def _message_stats(result: SolveResult, graph: CommGraph) -> Optional[MessageStats]:
    try:
        return account_solver_messages(result, graph)
    except InvalidArgumentError as e:
        # 通信图不连通时路由不存在
        AppLogger.get_logger(__name__, app_name='swarm').warning(f"跳过消息统计：{e}")
        return None


def _coverage_trial(job: TrialJob) -> TrialOutput:
    exp = job.experiment
    rng = scenario_rng(exp.seed, job.n_agents, job.trial)
    if job.mode == ExperimentMode.COMMSTUDY:
        scenario = gen_comm_study(job.n_agents, rng, exp.overrides)
    else:
        scenario = generate_scenario(exp.scenario(job.n_agents), rng)
    if not isinstance(scenario, CoverageScenario):
        raise InvalidArgumentError(f"mode {job.mode.value} needs a coverage scenario")

    comm_range = exp.comm_range if exp.comm_range is not None else scenario.comm_range
    graph = CommGraph(scenario.positions, comm_range)
    keys = {'n_agents': job.n_agents, 'trial': job.trial, 'seed': exp.seed}
    output = TrialOutput()

    for text in resolve_solver_texts(exp.solver, exp.rounds):
        spec = parse_solver_spec(text)
        context = scenario.solver_context(gamma=exp.gamma, comm_range=exp.comm_range)
        result = run_solver(spec, context, solver_rng(exp.seed, job.n_agents, job.trial, text), job.solver)

        output.records.append(TrialRecord(
            family=scenario.family.value, solver=text, objective=result.value,
            rounds_used=result.rounds_used, converged=result.converged, psi=result.psi,
            planning_evals=result.eval_count, **keys,
        ))

        needs_graph = job.compute_bounds and result.psi is None and bool(result.deleted_edges)
        report = bound_report(scenario.objective, scenario.matroid, result,
                              scenario.redundancy() if needs_graph else None)
        output.bounds.append({**keys, 'solver': text, **report.model_dump()})

        stats = _message_stats(result, graph)
        if stats is not None:
            output.messages.append({
                'n_agents': job.n_agents, 'solver': text, 'objective': result.value,
                'messages': stats.messages, 'volume': stats.volume, 'span': stats.span,
                'converged': result.converged, 'trial': job.trial, 'seed': exp.seed,
                'broadcast_messages': stats.broadcast_messages, 'rounds': stats.rounds,
                'volume_bytes': stats.volume_bytes,
            })
    return output


def _tracking_trial(job: TrialJob) -> TrialOutput:
    exp = job.experiment
    overrides = dict(exp.overrides)
    if exp.comm_range is not None:
        overrides['comm_range'] = exp.comm_range
    scenario = gen_tracking(job.n_agents, scenario_rng(exp.seed, job.n_agents, job.trial), exp.seed, overrides)
    keys = {'n_agents': job.n_agents, 'trial': job.trial, 'seed': exp.seed}
    output = TrialOutput()
    for text in resolve_solver_texts(exp.solver, exp.rounds):
        spec = parse_solver_spec(text)
        rng = solver_rng(exp.seed, job.n_agents, job.trial, text)
        result = run_tracking_trial(scenario, spec, rng, job.tracking, trial=job.trial)
        output.steps.extend(result.records)
        output.records.append(TrialRecord(
            family=ScenarioFamily.TRACKING.value, solver=text, objective=result.summary_entropy,
            rounds_used=spec.n_d or 1, planning_evals=sum(r.planning_evals for r in result.records),
            weight_per_robot=result.weight_per_robot, **keys,
        ))
        output.bounds.extend({**keys, 'solver': text, **b.model_dump()} for b in result.bounds)
        output.messages.extend({
            **keys, 'solver': text, 'step': step, 'messages': stats.messages, 'volume': stats.volume,
            'span': stats.span, 'broadcast_messages': stats.broadcast_messages, 'rounds': stats.rounds,
            'volume_bytes': stats.volume_bytes,
        } for step, stats in result.messages)
    return output


def run_trial_job(job: TrialJob) -> TrialOutput:
    """工作进程入口，必须是模块级函数以便序列化"""
    if job.mode == ExperimentMode.TRACK:
        return _tracking_trial(job)
    return _coverage_trial(job)


# ============3. 实验服务===============

@dataclass
class ExperimentArtifacts:
    """一次运行写出的文件与主要数据表"""
    out_dir: Path
    files: Dict[str, Path]
    results: pd.DataFrame
    summary: pd.DataFrame


class ExperimentService(BaseService):
    """按配置运行全部 (规模, 试验, 求解器) 组合

    场景与求解器使用互不相同的派生随机流，同一 (seed, n, trial) 下不同求解器看到同一场景；
    结果按试验编号收集，与工作进程的完成顺序无关。
    """

    def __init__(self, experiment: ExperimentConfig, config: Optional[ExperimentServiceConfig] = None):
        super().__init__(config or ExperimentServiceConfig(), __name__)
        self.experiment = experiment
        self.config.tracking = self._resolve_tracking(self.config.tracking)

    def _resolve_tracking(self, tracking: TrackingConfig) -> TrackingConfig:
        changes = {'compute_bounds': self.config.compute_bounds}
        if self.experiment.samples is not None:
            changes['n_samples'] = self.experiment.samples
        if self.experiment.gamma is not None:
            changes['gamma'] = self.experiment.gamma
        return dataclasses.replace(tracking, **changes)

    def jobs(self) -> List[TrialJob]:
        return [
            TrialJob(self.experiment, n, trial, self.config.mode, self.config.compute_bounds,
                     self.config.solver, self.config.tracking)
            for n in self.experiment.n_agents
            for trial in range(self.experiment.trials)
        ]

    def _execute(self, jobs: List[TrialJob]) -> List[TrialOutput]:
        """按试验编号收集结果；任一试验失败时记录其 (n, trial) 后重新抛出"""
        workers = min(self.config.workers, len(jobs))
        self.logger.info(f"共 {len(jobs)} 个试验，使用 {workers} 个进程")
        if workers <= 1:
            return [self._collect(job, lambda job=job: run_trial_job(job)) for job in jobs]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run_trial_job, job) for job in jobs]
            return [self._collect(job, future.result) for job, future in zip(jobs, futures)]

    def _collect(self, job: TrialJob, fetch: Callable[[], TrialOutput]) -> TrialOutput:
        try:
            return fetch()
        except Exception as e:
            self.handle_error(e, f"试验失败（n={job.n_agents}，trial={job.trial}）")
            raise

    def _write_summary(self, records: List[TrialRecord], path: Path) -> Tuple[pd.DataFrame, Path]:
        """写出汇总表并从落盘文件读回核对，确认它能由逐行结果重新算出"""
        if not records:
            return pd.DataFrame(), write_csv(self._stamp(pd.DataFrame()), path)
        rows = RunSummary(rows=records)
        summary = rows.aggregate()
        written = write_csv(self._stamp(summary), path)
        try:
            rows.verify(read_csv(written))
        except ResultConsistencyError as e:
            self.handle_error(e, f"汇总表核对失败：{written}")
            raise
        return summary, written

    def manifest_config(self) -> Dict[str, Any]:
        config = self.experiment.model_dump(mode='json')
        config['solver'] = resolve_solver_texts(self.experiment.solver, self.experiment.rounds)
        config['mode'] = self.config.mode.value
        config['compute_bounds'] = self.config.compute_bounds
        if self.config.mode == ExperimentMode.TRACK:
            config['tracking'] = {k: v for k, v in dataclasses.asdict(self.config.tracking).items() if k != 'solver'}
        if self.config.mode == ExperimentMode.PROBSENSE:
            mixture = self.experiment.overrides.get('mixture')
            config['mixture'] = (MixtureSpec(**mixture) if mixture else MixtureSpec()).model_dump(mode='json')
        return config

    def _stamp(self, frame: pd.DataFrame) -> pd.DataFrame:
        frame = frame.copy()
        frame['git_describe'] = git_describe()
        return frame

    def run(self) -> ExperimentArtifacts:
        out_dir = self.config.out_dir
        self.logger.info(f"开始 {self.config.mode.value} 实验：n={self.experiment.n_agents}，"
                         f"trials={self.experiment.trials}，solvers={self.experiment.solver}")
        outputs = self._execute(self.jobs())

        records = [r for o in outputs for r in o.records]
        results = records_frame(records)
        files = {'results': write_csv(self._stamp(results), out_dir / 'results.csv')}
        summary, files['summary'] = self._write_summary(records, out_dir / 'summary.csv')
        if self.config.mode == ExperimentMode.TRACK:
            steps = records_frame([s for o in outputs for s in o.steps])
            files['steps'] = write_csv(self._stamp(steps), out_dir / 'steps.csv')
        files['bounds'] = write_csv(self._stamp(records_frame([b for o in outputs for b in o.bounds])),
                                    out_dir / 'bounds.csv')
        files['messages'] = write_csv(self._stamp(records_frame([m for o in outputs for m in o.messages])),
                                      out_dir / 'messages.csv')
        files['manifest'] = write_manifest(out_dir, self.manifest_config(), {'seed': self.experiment.seed})
        self.logger.info(f"实验完成，结果写入 {out_dir}")
        return ExperimentArtifacts(out_dir=out_dir, files=files, results=results, summary=summary)
