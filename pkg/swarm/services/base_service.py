# swarm/services/base_service.py
from abc import ABC, abstractmethod
from typing import Any

from utils.logger_handler import AppLogger


class BaseService(ABC):
    """服务基类，提供日志与统一的错误记录，命令行的各个子命令都通过具体服务完成工作

    Attributes:
        config (Any): 服务配置对象
        logger (Logger): 日志记录器实例
    """

    def __init__(self, config: Any, logger_name: str = __name__):
        self.config = config
        self.logger = AppLogger.get_logger(logger_name, app_name='swarm')

    @abstractmethod
    def run(self) -> Any:
        """执行服务的主要工作"""
        pass

    def handle_error(self, error: Exception, context: str) -> None:
        """记录错误与完整堆栈，不吞掉异常，由调用方决定是否继续"""
        self.logger.error(f"{context}: {str(error)}", exc_info=True)
