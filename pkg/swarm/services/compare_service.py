# swarm/services/compare_service.py
"""多个运行结果的配对比较

按 (n_agents, trial) 连接各运行的 results.csv，要求同一键上的种子一致。
delta = 基准值 − 本行值（基准为第一个运行的第一个求解器，可指定）；
ratio_to_sequential = 本行值 / 同键上 sequential 的值。
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config import SwarmConfig
from swarm.exceptions import ComparisonError
from swarm.services.base_service import BaseService
from utils.io_handler import read_csv, write_csv

KEY_COLUMNS = ['n_agents', 'trial']
REQUIRED_COLUMNS = KEY_COLUMNS + ['seed', 'solver']


@dataclass
class CompareServiceConfig:
    """比较服务配置

    Attributes:
        inputs: 结果文件或包含 results.csv 的目录，至少一个
        out_path: 比较结果 CSV 路径
        value_column: 参与比较的列
        baseline: 作为 delta 基准的求解器描述串，None 取第一个运行的第一个求解器
    """
    inputs: List[Path] = field(default_factory=list)
    out_path: Path = SwarmConfig.PATHS.RESULTS_DIR / 'comparison.csv'
    value_column: str = 'objective'
    baseline: Optional[str] = None

    def __post_init__(self):
        self.inputs = [Path(p) for p in self.inputs]
        self.out_path = Path(self.out_path)
        if not self.inputs:
            raise ValueError("compare needs at least one result file")


def _results_path(path: Path) -> Path:
    return path / 'results.csv' if path.is_dir() else path


def load_runs(paths: Sequence[Union[str, Path]], value_column: str = 'objective') -> pd.DataFrame:
    """读入各运行并加上 run 列（输入顺序编号）"""
    frames = []
    for run, path in enumerate(paths):
        path = _results_path(Path(path))
        if not path.exists():
            raise ComparisonError(f"result file {path} does not exist")
        frame = read_csv(path)
        missing = [c for c in REQUIRED_COLUMNS + [value_column] if c not in frame.columns]
        if missing:
            raise ComparisonError(f"{path} lacks columns {missing}")
        frame = frame[REQUIRED_COLUMNS + [value_column]].copy()
        frame.insert(0, 'run', run)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def compare_runs(runs: pd.DataFrame, value_column: str = 'objective',
                 baseline: Optional[str] = None) -> pd.DataFrame:
    """计算配对 delta 与相对 sequential 的比值"""
    seeds = runs.groupby(KEY_COLUMNS)['seed'].nunique()
    if (seeds > 1).any():
        bad = seeds[seeds > 1].index.tolist()
        raise ComparisonError(f"runs disagree on seeds for (n_agents, trial) keys {bad[:5]}")

    if baseline is None:
        first = runs.iloc[0]
        base_rows = runs[(runs['run'] == first['run']) & (runs['solver'] == first['solver'])]
    else:
        base_rows = runs[runs['solver'] == baseline]
        if base_rows.empty:
            raise ComparisonError(f"baseline solver '{baseline}' not found in the inputs")
        base_rows = base_rows[base_rows['run'] == base_rows['run'].min()]

    reference = base_rows[KEY_COLUMNS + [value_column]].rename(columns={value_column: 'baseline'})
    merged = runs.merge(reference, on=KEY_COLUMNS, how='inner')
    if merged.empty:
        raise ComparisonError("runs share no (n_agents, trial) keys with the baseline")
    merged['delta'] = merged['baseline'] - merged[value_column]

    sequential = runs[runs['solver'] == 'sequential']
    if not sequential.empty:
        sequential = sequential[sequential['run'] == sequential['run'].min()]
        sequential = sequential[KEY_COLUMNS + [value_column]].rename(columns={value_column: 'sequential'})
        merged = merged.merge(sequential, on=KEY_COLUMNS, how='left')
        with np.errstate(divide='ignore', invalid='ignore'):
            merged['ratio_to_sequential'] = merged[value_column] / merged['sequential']
        merged = merged.drop(columns='sequential')
    else:
        merged['ratio_to_sequential'] = np.nan

    return merged.sort_values(['run', 'solver'] + KEY_COLUMNS, kind='stable').reset_index(drop=True)


def summarize_comparison(comparison: pd.DataFrame) -> pd.DataFrame:
    """按 (run, solver, n_agents) 汇总 delta 的均值与标准误"""
    grouped = comparison.groupby(['run', 'solver', 'n_agents'], sort=True)['delta']
    summary = grouped.agg(['count', 'mean', 'std']).reset_index()
    summary['std'] = summary['std'].fillna(0.0)
    summary['stderr'] = summary['std'] / np.sqrt(summary['count'])
    return summary


class CompareService(BaseService):
    """读入若干运行，写出配对比较表"""

    def __init__(self, config: CompareServiceConfig):
        super().__init__(config, __name__)

    def run(self) -> pd.DataFrame:
        runs = load_runs(self.config.inputs, self.config.value_column)
        comparison = compare_runs(runs, self.config.value_column, self.config.baseline)
        write_csv(comparison, self.config.out_path)
        summary = summarize_comparison(comparison)
        self.logger.info(f"配对比较汇总：\n{summary.to_string(index=False)}")
        return comparison
