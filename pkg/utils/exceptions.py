"""工具链异常定义

值类错误同时继承 ValueError，兼容按 ValueError 捕获的调用方。
"""
from typing import Optional


class ToolchainError(Exception):
    """工具链基础异常"""


class ConstructionError(ToolchainError, ValueError):
    """模块构造参数非法（空矩阵、非正阈值/时间常数、长度不匹配等）"""


class GraphConnectionError(ToolchainError, ValueError):
    """connect_modules 两端端口数不一致"""

    def __init__(self, message: str, stage: Optional[int] = None):
        super().__init__(message)
        self.stage = stage


class EncapsulationError(ToolchainError, ValueError):
    """GraphHolder 边界节点不可达"""


class CycleError(ToolchainError):
    """不同模块之间存在环"""

    def __init__(self, message: str, members=None):
        super().__init__(message)
        self.members = list(members or [])


class MappingError(ToolchainError):
    """图无法映射到硬件规格"""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class DomainError(ToolchainError, ValueError):
    """数值参数超出定义域（非正时间常数、负发放率等）"""


class ParseError(ToolchainError, ValueError):
    """文件解析失败，location 指出出错位置"""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{message} (位置: {location})" if location else message)
        self.location = location


class ShapeError(ToolchainError, ValueError):
    """数组维度不匹配"""


class UnsealedConfig(ToolchainError):
    """硬件配置未通过校验（未封印），拒绝仿真"""


class PipelineStageError(ToolchainError):
    """流水线某一阶段失败，stage 为阶段名"""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class ConfigValidationError(ToolchainError):
    """硬件配置校验失败，message 为逐行违例说明"""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
