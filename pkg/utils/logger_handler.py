import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from typing import Optional, Union
from functools import lru_cache
from config import SwarmConfig


class AppLogger:
    """应用程序通用日志工具类

    提供统一的日志配置和管理功能：
    1. 按应用和模块分类的日志文件
    2. 控制台和文件双重输出
    3. 自动日志轮转，错误日志单独存放
    4. 可通过 SUBMOD_SWARM_LOG_TO_FILE=0 关闭文件输出（测试与子进程中使用）
    """

    DEFAULT_FORMAT = '%(asctime)s - %(name)s - [%(levelname)s] - %(filename)s:%(lineno)d - %(message)s'
    ERROR_FORMAT = '%(asctime)s - %(name)s - [%(levelname)s] - %(pathname)s:%(lineno)d - %(message)s'

    MAX_BYTES = 10 * 1024 * 1024  # 10MB
    BACKUP_COUNT = 5

    _LOG_ROOT = SwarmConfig.PATHS.LOGS_DIR
    _DEBUG = False

    @classmethod
    def set_log_root(cls, path: Union[str, Path]) -> None:
        """设置日志根目录"""
        cls._LOG_ROOT = Path(path)
        cls._LOG_ROOT.mkdir(parents=True, exist_ok=True)
        cls.get_logger.cache_clear()

    @classmethod
    @lru_cache(maxsize=64)
    def get_logger(cls,
                   name: str,
                   level: Union[int, str, None] = None,
                   log_to_console: bool = True,
                   log_to_file: Optional[bool] = None,
                   app_name: Optional[str] = None) -> logging.Logger:
        """获取logger实例

        Args:
            name: logger名称（通常使用__name__）
            level: 日志级别，默认取 SwarmConfig.APP.LOG_LEVEL
            log_to_console: 是否输出到控制台
            log_to_file: 是否输出到文件，默认取 SwarmConfig.APP.LOG_TO_FILE
            app_name: 应用名称，用于日志分类存储

        Returns:
            logging.Logger: 配置好的logger实例
        """
        logger = logging.getLogger(name)
        if logger.handlers:  # 防止重复配置
            return logger

        if level is None:
            level = logging.DEBUG if cls._DEBUG else SwarmConfig.APP.LOG_LEVEL
        if isinstance(level, str):
            level = getattr(logging, level.upper())
        logger.setLevel(level)
        logger.propagate = False

        formatter = logging.Formatter(cls.DEFAULT_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')

        if log_to_console:
            # 结果表格走 stdout，日志统一走 stderr
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            logger.addHandler(console_handler)

        if log_to_file is None:
            log_to_file = SwarmConfig.APP.LOG_TO_FILE

        if log_to_file:
            module_name = name.split('.')[0]
            log_dir = cls._LOG_ROOT / app_name / module_name if app_name else cls._LOG_ROOT / module_name
            log_dir.mkdir(parents=True, exist_ok=True)
            stem = name.replace('.', '_')

            file_handler = RotatingFileHandler(
                log_dir / f"{stem}.log",
                maxBytes=cls.MAX_BYTES,
                backupCount=cls.BACKUP_COUNT,
                encoding='utf-8'
            )
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

            daily_handler = TimedRotatingFileHandler(
                log_dir / f"{stem}_daily.log",
                when='midnight',
                interval=1,
                backupCount=30,
                encoding='utf-8'
            )
            daily_handler.setFormatter(formatter)
            logger.addHandler(daily_handler)

            error_handler = RotatingFileHandler(
                log_dir / f"{stem}_error.log",
                maxBytes=cls.MAX_BYTES,
                backupCount=cls.BACKUP_COUNT,
                encoding='utf-8'
            )
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(logging.Formatter(cls.ERROR_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
            logger.addHandler(error_handler)

        return logger

    @classmethod
    def set_debug_mode(cls) -> None:
        """切换到调试级别：已创建的logger立即生效，之后创建的logger默认DEBUG"""
        cls._DEBUG = True
        for logger in logging.Logger.manager.loggerDict.values():
            if isinstance(logger, logging.Logger) and logger.handlers:
                logger.setLevel(logging.DEBUG)
                for handler in logger.handlers:
                    if handler.level != logging.ERROR:
                        handler.setLevel(logging.DEBUG)

    @classmethod
    def clear_cache(cls) -> None:
        """清除logger缓存"""
        cls.get_logger.cache_clear()
