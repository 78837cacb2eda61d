# ./config.py

import os
from pathlib import Path


def get_project_root() -> Path:
    """获取项目根目录（查找包含.gitignore/.env/main.py等标记文件的目录）"""
    current = Path(__file__).parent.resolve()

    marker_files = ['.gitignore', '.env', 'main.py']

    while current != current.parent:  # 防止到达文件系统根目录
        if any((current / marker).exists() for marker in marker_files):
            return current
        current = current.parent

    return Path(__file__).parent.resolve()


def _env_flag(name: str, default: bool) -> bool:
    """读取布尔型环境变量（0/false/no 视为关闭）"""
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() not in ('0', 'false', 'no', 'off', '')


class SwarmConfig:
    """多机器人子模规划实验的全局配置"""

    class PATHS:
        """文件路径配置"""
        _ROOT = get_project_root()

        DATA_DIR = _ROOT / "data"
        LOGS_DIR = DATA_DIR / "logs"  # 日志处理器首次使用时创建
        RESULTS_DIR = DATA_DIR / "results"  # 写出结果时按需创建

    class SOLVER:
        """规划器配置"""
        TIE_TOLERANCE = 1e-12  # 目标值差异小于该值视为平局，按 (agent_id, action_id) 字典序决胜
        ENUMERATION_CAP = 10 ** 6  # 穷举最优解时允许的最大基数量
        AUCTION_ROUND_FACTOR = 3  # 拍卖默认最大轮数 = 因子 × 智能体数
        MAX_WORKERS = 1  # 同一DAG层内并行求解的线程数

    class OBJECTIVE:
        """目标函数配置"""
        GRID_RESOLUTION = 512  # 面积覆盖的网格分辨率（每边单元数）
        DETECTION_RADIUS_POWER = 4.0  # 检测模型 exp(-d^2 / r_s^p) 中的 p

    class SCENARIO:
        """场景生成配置"""
        ACTIONS_PER_AGENT = 10
        N_EVENTS = 50
        # 概率感知任务的事件分布：三分量等权高斯混合
        MIXTURE_MEANS = ((0.25, 0.25), (0.7, 0.3), (0.5, 0.8))
        MIXTURE_SIGMA = 0.12
        MIXTURE_WEIGHTS = (1 / 3, 1 / 3, 1 / 3)
        GAMMA_NUMERATOR = 0.4  # γ = 0.4 / n
        COMM_RANGE_FACTOR = 2.0  # 概率感知任务 r_c = 2 r_a

    class TRACKING:
        """目标跟踪配置"""
        GRID_DENSITY = 12.5  # 网格边长 = round(sqrt(12.5 n))
        HORIZON = 2
        TRIAL_LENGTH = 100
        BURN_IN = 20
        N_SAMPLES = 50
        RANGE_SATURATION = 20.0  # 测距均值上限
        RANGE_VARIANCE_BASE = 0.25
        RANGE_VARIANCE_SCALE = 0.5
        SPARSE_THRESHOLD = 1e-3
        SPARSE_MIN_ROBOTS = 16  # 机器人数不少于该值时启用稀疏滤波器
        TARGET_RANGE_LIMIT = 12.0  # 限距规划忽略更远的目标
        ROBOT_RANGE_LIMIT = 20.0  # 限距规划忽略更远机器人的决策

    class NETSIM:
        """通信仿真配置"""
        DECISION_BYTES = 130  # 单个决策消息约 130 字节
        COMM_STUDY_RANGE_FACTOR = 3.0  # 通信研究中 r_c = 3 r_a
        COMM_STUDY_AGENTS = tuple(range(10, 101, 10))

    class APP:
        """应用程序配置"""
        SEED_ENV_VAR = "SUBMOD_SWARM_SEED"
        LOG_TO_FILE = _env_flag("SUBMOD_SWARM_LOG_TO_FILE", True)
        LOG_LEVEL = os.getenv("SUBMOD_SWARM_LOG_LEVEL", "INFO")
