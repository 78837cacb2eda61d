"""多机器人分布式子模规划实验程序

子命令：
1. coverage / probsense  面积覆盖与概率感知实验
2. track                 多目标跟踪实验
3. commstudy             通信开销研究
4. compare               配对比较多个运行
5. tinycheck             小规模穷举核对

用法:
    python main.py <subcommand> [options]

退出码：0 成功；2 配置或求解器描述串无效、比较输入不匹配；3 穷举规模超限；
tinycheck 返回失败数（上限 125）；1 其他错误。
"""
import argparse
import json
import os
import sys
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from config import SwarmConfig
from swarm.exceptions import ComparisonError, ConfigError, EnumerationTooLargeError
from swarm.models.config_model import ExperimentConfig
from swarm.services.compare_service import CompareService, CompareServiceConfig
from swarm.services.experiment_service import ExperimentMode, ExperimentService, ExperimentServiceConfig
from swarm.services.tinycheck_service import TinycheckConfig, TinycheckService
from swarm.solvers.registry import parse_solver_spec
from utils.logger_handler import AppLogger

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_TOO_LARGE = 3

COMM_STUDY_SOLVERS = ("rrsp:4", "auction:global", "sequential")
TRACK_DEFAULT_AGENTS = 8


# 定义运行模式
class RunMode(Enum):
    """应用程序运行模式"""
    COVERAGE = "coverage"  # 面积覆盖
    PROBSENSE = "probsense"  # 概率感知
    TRACK = "track"  # 多目标跟踪
    COMMSTUDY = "commstudy"  # 通信研究
    COMPARE = "compare"  # 配对比较
    TINYCHECK = "tinycheck"  # 小规模穷举核对


# 命令模式的基类
class SwarmCommand(ABC):
    """命令基类，execute 返回退出码"""

    @abstractmethod
    def execute(self, app: 'SwarmCommandLineApp') -> int:
        pass


class ExperimentCommand(SwarmCommand):
    """实验命令：解析配置 → 运行 → 写出结果"""

    def __init__(self, mode: ExperimentMode):
        self.mode = mode

    def execute(self, app: 'SwarmCommandLineApp') -> int:
        experiment = app.resolve_experiment(self.mode)
        service_config = ExperimentServiceConfig(
            out_dir=Path(app.args.out) if app.args.out else SwarmConfig.PATHS.RESULTS_DIR / self.mode.value,
            jobs=experiment.jobs,
            mode=self.mode,
            compute_bounds=not app.args.no_bounds,
        )
        artifacts = ExperimentService(experiment, service_config).run()
        print(f"\n=== {self.mode.value} 实验完成 ===")
        if len(artifacts.summary):
            print(artifacts.summary.to_string(index=False))
        for name, path in artifacts.files.items():
            print(f"  {name}: {path}")
        return EXIT_OK


class CompareCommand(SwarmCommand):
    """配对比较命令"""

    def execute(self, app: 'SwarmCommandLineApp') -> int:
        out_path = Path(app.args.out) if app.args.out else SwarmConfig.PATHS.RESULTS_DIR / 'comparison.csv'
        config = CompareServiceConfig(inputs=[Path(p) for p in app.args.inputs], out_path=out_path,
                                      value_column=app.args.column, baseline=app.args.baseline)
        comparison = CompareService(config).run()
        print(f"\n=== 配对比较：{len(comparison)} 行，写入 {out_path} ===")
        return EXIT_OK


class TinycheckCommand(SwarmCommand):
    """小规模核对命令，退出码为失败数"""

    def execute(self, app: 'SwarmCommandLineApp') -> int:
        service = TinycheckService(TinycheckConfig(
            cases=app.args.cases, seed=app.resolve_seed(None), tolerance=app.args.tolerance,
            mutant=app.args.mutant,
        ))
        service.run()
        print("\n=== 小规模核对 ===")
        print(service.report())
        return service.exit_code()


class SwarmCommandFactory:
    """命令工厂"""

    @staticmethod
    def create_command(mode: RunMode) -> SwarmCommand:
        command_map = {
            RunMode.COVERAGE: ExperimentCommand(ExperimentMode.COVERAGE),
            RunMode.PROBSENSE: ExperimentCommand(ExperimentMode.PROBSENSE),
            RunMode.TRACK: ExperimentCommand(ExperimentMode.TRACK),
            RunMode.COMMSTUDY: ExperimentCommand(ExperimentMode.COMMSTUDY),
            RunMode.COMPARE: CompareCommand(),
            RunMode.TINYCHECK: TinycheckCommand(),
        }
        return command_map[mode]


class SwarmCommandLineApp:
    """命令行应用程序"""

    def __init__(self, argv: Optional[Sequence[str]] = None):
        self.root_dir = Path(__file__).parent
        self.logger = AppLogger.get_logger(__name__, app_name='swarm')

        self.args = self._parse_arguments(argv)
        if self.args.debug:
            self._set_debug_logging()
        self._load_environment()

    # ============1. 参数解析===============

    @staticmethod
    def _add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--config", help="JSON 实验配置文件，命令行参数优先")
        parser.add_argument("--solver", action="append", help="求解器描述串，可重复，例如 rsp:4、auction:global")
        parser.add_argument("--agents", type=int, nargs="+", help="一个或多个智能体数量")
        parser.add_argument("--trials", type=int, help="每个规模的试验次数")
        parser.add_argument("--seed", type=int, help=f"随机种子，缺省读环境变量 {SwarmConfig.APP.SEED_ENV_VAR}")
        parser.add_argument("--jobs", type=int, help="并行进程数，默认逻辑核数")
        parser.add_argument("--out", help="输出目录")
        parser.add_argument("--rounds", type=int, help="未写轮数的 rsp/rrsp/dsga 使用的 n_d")
        parser.add_argument("--gamma", type=float, help="自适应轮数策略的 γ")
        parser.add_argument("--comm-range", type=float, dest="comm_range", help="通信半径 r_c")
        parser.add_argument("--samples", type=int, help="跟踪目标函数的蒙特卡洛样本数")
        parser.add_argument("--no-bounds", action="store_true", dest="no_bounds",
                            help="不计算冗余图（删除边权重记为未知）")

    def _parse_arguments(self, argv: Optional[Sequence[str]]) -> argparse.Namespace:
        parser = argparse.ArgumentParser(description="多机器人分布式子模规划实验程序")
        parser.add_argument("--debug", action="store_true", help="启用调试模式，输出详细日志")
        parser.add_argument("--env-file", dest="env_file", help="指定环境变量文件")
        subparsers = parser.add_subparsers(dest="mode", required=True)

        for mode, text in ((RunMode.COVERAGE, "面积覆盖实验"), (RunMode.PROBSENSE, "概率感知实验"),
                           (RunMode.TRACK, "多目标跟踪实验"), (RunMode.COMMSTUDY, "通信开销研究")):
            self._add_experiment_arguments(subparsers.add_parser(mode.value, help=text))

        compare = subparsers.add_parser(RunMode.COMPARE.value, help="配对比较多个运行")
        compare.add_argument("inputs", nargs="+", help="results.csv 或其所在目录")
        compare.add_argument("--out", help="比较结果 CSV 路径")
        compare.add_argument("--baseline", help="delta 的基准求解器")
        compare.add_argument("--column", default="objective", help="参与比较的列")

        tinycheck = subparsers.add_parser(RunMode.TINYCHECK.value, help="小规模穷举核对")
        tinycheck.add_argument("--cases", type=int, default=200, help="每项核对的实例数")
        tinycheck.add_argument("--seed", type=int, help="实例生成种子")
        tinycheck.add_argument("--tolerance", type=float, default=1e-9, help="数值容差")
        tinycheck.add_argument("--mutant", action="store_true", help="使用符号翻转的错误目标函数")

        return parser.parse_args(argv)

    def _set_debug_logging(self) -> None:
        """设置调试级别日志"""
        AppLogger.set_debug_mode()
        self.logger.debug("调试模式已启用")

    def _load_environment(self) -> None:
        """按优先级加载环境变量：--env-file > .env.local > .env"""
        env_local = self.root_dir / '.env.local'
        env_default = self.root_dir / '.env'
        env_file = self.args.env_file and Path(self.args.env_file)

        if env_file and env_file.exists():
            load_dotenv(env_file)
            self.logger.info(f"从 {env_file} 加载环境变量")
        elif env_local.exists():
            load_dotenv(env_local)
            self.logger.info("从 .env.local 加载环境变量")
        elif env_default.exists():
            load_dotenv(env_default)
            self.logger.info("从 .env 加载环境变量")
        else:
            self.logger.debug("未找到环境变量文件，使用默认配置")

    # ============2. 配置解析===============

    def resolve_seed(self, file_seed: Optional[int]) -> int:
        """--seed > 配置文件 > 环境变量 > 0"""
        if getattr(self.args, 'seed', None) is not None:
            return self.args.seed
        if file_seed is not None:
            return file_seed
        env_seed = os.getenv(SwarmConfig.APP.SEED_ENV_VAR)
        if env_seed:
            try:
                return int(env_seed)
            except ValueError:
                raise ConfigError(f"{SwarmConfig.APP.SEED_ENV_VAR}='{env_seed}' is not an integer")
        return 0

    def _read_config_file(self) -> Dict[str, Any]:
        if not self.args.config:
            return {}
        path = Path(self.args.config)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a JSON object")
        return data

    def resolve_experiment(self, mode: ExperimentMode) -> ExperimentConfig:
        """合并配置文件与命令行参数，校验全部求解器描述串"""
        data = self._read_config_file()
        data['family'] = mode.family.value
        data['seed'] = self.resolve_seed(data.get('seed'))

        flags = {
            'n_agents': self.args.agents, 'trials': self.args.trials, 'solver': self.args.solver,
            'jobs': self.args.jobs, 'rounds': self.args.rounds, 'gamma': self.args.gamma,
            'comm_range': self.args.comm_range, 'samples': self.args.samples,
        }
        data.update({k: v for k, v in flags.items() if v is not None})

        if mode == ExperimentMode.COMMSTUDY:
            data.setdefault('n_agents', list(SwarmConfig.NETSIM.COMM_STUDY_AGENTS))
            data.setdefault('solver', list(COMM_STUDY_SOLVERS))
        elif mode == ExperimentMode.TRACK:
            data.setdefault('n_agents', TRACK_DEFAULT_AGENTS)

        try:
            experiment = ExperimentConfig(**data)
        except ValidationError as e:
            raise ConfigError(f"invalid experiment config: {e}")

        rounds_suffix = f":{experiment.rounds}" if experiment.rounds else ""
        for text in experiment.solver:
            bare = text.strip().lower() in ("rsp", "rrsp", "dsga")
            parse_solver_spec(text + rounds_suffix if bare else text)
        return experiment

    # ============3. 运行===============

    def run(self) -> int:
        """运行应用程序，返回退出码"""
        mode = RunMode(self.args.mode)
        self.logger.info(f"以 {mode.value} 模式运行")
        try:
            return SwarmCommandFactory.create_command(mode).execute(self)
        except (ConfigError, ComparisonError) as e:
            self.logger.error(f"输入无效: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INVALID
        except EnumerationTooLargeError as e:
            self.logger.error(f"穷举规模超限: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_TOO_LARGE
        except Exception as e:
            self.logger.error(f"应用程序运行失败: {e}", exc_info=True)
            print(f"\n应用程序运行失败: {e}\n请查看日志获取详细信息", file=sys.stderr)
            return EXIT_FAILURE
        finally:
            self.cleanup()

    def cleanup(self) -> None:
        self.logger.info("=== 运行结束 ===")


def main(argv: Optional[List[str]] = None) -> int:
    """主程序入口"""
    app = SwarmCommandLineApp(argv)
    return app.run()


if __name__ == "__main__":
    sys.exit(main())
