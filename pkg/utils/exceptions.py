"""
异常定义模块
求解器、预言机与命令行共用的错误类型
"""

from typing import List, Optional


class ReloadError(Exception):
    """所有错误的基类"""


class ValidationError(ReloadError, ValueError):
    """参数或前置条件错误"""


class SingularityError(ValidationError):
    """负熵散度的参考点含零分量"""


class SolverError(ReloadError):
    """求解器运行失败"""


class NumericalError(SolverError):
    """线性求解失败或出现非有限值"""


class ConvergenceError(SolverError):
    """迭代达到上限仍未满足容差"""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class OracleError(ReloadError):
    """线性规划预言机失败"""


class LpCyclingError(OracleError):
    """单纯形迭代超过上限，附带当前基"""

    def __init__(self, message: str, basis: Optional[List[int]] = None):
        if basis is not None:
            message = f"{message}; 当前基: {list(basis)}"
        super().__init__(message)
        self.basis = list(basis) if basis is not None else []
