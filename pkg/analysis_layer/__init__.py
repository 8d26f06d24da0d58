"""
分析层模块
提供性能指标与收敛诊断功能
"""

from typing import Sequence

from .convergence_analysis import (
    ConvergenceAnalysis, LicStatus, LicVerdict, constraint_values_at, fitted_rate
)


# 便捷函数
def weighted_reward(v0: float, v_constraints: Sequence[float], thetas: Sequence[float],
                    mu_hat_star: Sequence[float]) -> float:
    """计算加权回报"""
    return ConvergenceAnalysis.weighted_reward(v0, v_constraints, thetas, mu_hat_star)


def penalized_reward(v0: float, v_constraints: Sequence[float], thetas: Sequence[float]) -> float:
    """计算惩罚回报"""
    return ConvergenceAnalysis.penalized_reward(v0, v_constraints, thetas)


def distance_to_saddle(trace, saddle):
    """计算到鞍点的距离序列"""
    return ConvergenceAnalysis.distance_to_saddle(trace, saddle)


def lic_diagnostic(series, window_fraction: float = None, tol: float = None) -> LicVerdict:
    """末迭代收敛判定"""
    kwargs = {}
    if window_fraction is not None:
        kwargs['window_fraction'] = window_fraction
    if tol is not None:
        kwargs['tol'] = tol
    return ConvergenceAnalysis.lic_diagnostic(series, **kwargs)


def estimate_mu_star_empirical(traces):
    """由非乐观基线估计 μ*"""
    return ConvergenceAnalysis.estimate_mu_star_empirical(traces)


__all__ = [
    'ConvergenceAnalysis', 'LicStatus', 'LicVerdict', 'constraint_values_at', 'fitted_rate',
    'weighted_reward', 'penalized_reward', 'distance_to_saddle', 'lic_diagnostic',
    'estimate_mu_star_empirical'
]
