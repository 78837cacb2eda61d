# swarm/exceptions.py


class SwarmError(Exception):
    """所有业务异常的基类"""
    pass


class InvalidArgumentError(SwarmError, ValueError):
    """参数不满足前置条件（元素重复、越界、γ≤0 等）"""
    pass


class InvalidProblemError(SwarmError, ValueError):
    """问题实例本身不合法（例如某个智能体的动作块为空）"""
    pass


class EnumerationTooLargeError(SwarmError):
    """穷举规模超过配置上限"""

    def __init__(self, size: int, cap: int):
        super().__init__(f"enumeration of {size} bases exceeds cap {cap}")
        self.size = size
        self.cap = cap

    def __reduce__(self):
        return type(self), (self.size, self.cap)


class ConfigError(SwarmError, ValueError):
    """实验配置或求解器描述串不合法"""
    pass


class ComparisonError(SwarmError):
    """对比的结果文件无法配对（种子不一致等）"""
    pass


class ResultConsistencyError(SwarmError):
    """汇总表无法由逐行结果重新算出"""
    pass
