# utils/io_handler.py
"""实验结果落盘：CSV、manifest 与版本信息

所有写入先落到同目录的临时文件，再用 Path.replace 原子替换，
中断的运行不会留下半截文件。浮点数统一保留 17 位有效数字。
"""
import json
import os
import subprocess
import tempfile
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import pandas as pd
from pydantic import BaseModel

from config import get_project_root
from utils.logger_handler import AppLogger

FLOAT_FORMAT = '%.17g'
PACKAGE_VERSION = "0.1.0"

logger = AppLogger.get_logger(__name__, app_name='swarm')


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    tmp_path = Path(tmp_name)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        tmp_path.replace(path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise


def records_frame(rows: Iterable[Union[BaseModel, Dict[str, Any]]]) -> pd.DataFrame:
    """pydantic 记录或字典 → DataFrame"""
    return pd.DataFrame([r.model_dump() if isinstance(r, BaseModel) else dict(r) for r in rows])


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """原子写 CSV：表头、UTF-8、'.' 小数点、17 位有效数字"""
    path = Path(path)
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    _atomic_write_text(path, text)
    logger.info(f"已写入 {path}（{len(frame)} 行）")
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(Path(path), float_precision='round_trip')


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=str) + "\n")
    logger.info(f"已写入 {path}")
    return path


@lru_cache(maxsize=1)
def git_describe(root: Optional[str] = None) -> str:
    """当前仓库的 git describe 字符串；不在仓库中或没有 git 时返回 'unknown'"""
    cwd = root or str(get_project_root())
    try:
        completed = subprocess.run(
            ['git', 'describe', '--always', '--dirty', '--tags'],
            cwd=cwd, capture_output=True, text=True, timeout=5, check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    described = completed.stdout.strip()
    return described if completed.returncode == 0 and described else "unknown"


def provenance() -> Dict[str, str]:
    return {'version': PACKAGE_VERSION, 'git_describe': git_describe()}


def write_manifest(out_dir: Union[str, Path], config: Dict[str, Any], extra: Optional[Dict[str, Any]] = None) -> Path:
    """manifest.json：解析后的配置 + 版本信息

    不写入时间戳，相同配置的两次运行产出逐字节相同的文件。
    """
    manifest = {'config': config, **provenance()}
    if extra:
        manifest.update(extra)
    return write_json(manifest, Path(out_dir) / 'manifest.json')
