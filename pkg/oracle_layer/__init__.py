"""
预言机层模块
修正单纯形法、CMDP 线性规划鞍点与蛮力交叉验证
"""

from .revised_simplex import LpStatus, LpSolution, RevisedSimplex, solve_lp
from .lp_oracle import (
    SaddleStatus, ThresholdClass, SaddlePoint,
    solve_cmdp_lp, achievable_range, classify_threshold
)
from .brute_force import brute_force_verify, simplex_grid

__all__ = [
    'LpStatus', 'LpSolution', 'RevisedSimplex', 'solve_lp',
    'SaddleStatus', 'ThresholdClass', 'SaddlePoint',
    'solve_cmdp_lp', 'achievable_range', 'classify_threshold',
    'brute_force_verify', 'simplex_grid'
]
