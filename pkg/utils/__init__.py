"""
工具模块
日志与错误类型
"""

from .logger import setup_logger, get_logger
from .exceptions import (
    ReloadError, ValidationError, SingularityError, SolverError,
    NumericalError, ConvergenceError, OracleError, LpCyclingError
)

__all__ = [
    'setup_logger', 'get_logger',
    'ReloadError', 'ValidationError', 'SingularityError', 'SolverError',
    'NumericalError', 'ConvergenceError', 'OracleError', 'LpCyclingError'
]
