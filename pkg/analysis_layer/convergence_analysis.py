"""
收敛分析模块
性能指标、到鞍点的距离、振幅与末迭代/平均迭代收敛判定
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import expit

from cmdp_layer import Multipliers
from config.settings import LIC_TOL_TOY, LIC_WINDOW_FRACTION
from game_layer import fit_linear_rate, running_average
from oracle_layer import SaddlePoint
from solver_layer import CmdpTrace
from utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


class LicStatus(Enum):
    """收敛判定"""
    CONVERGED = "converged"
    OSCILLATING = "oscillating"


@dataclass
class LicVerdict:
    """
    末窗口判定结果

    Args:
        status: 收敛或振荡
        amplitude: 末窗口内 max - min
        limit: 序列最后一个值
        window: 末窗口长度
    """
    status: LicStatus
    amplitude: float
    limit: float
    window: int

    @property
    def converged(self) -> bool:
        return self.status == LicStatus.CONVERGED


class ConvergenceAnalysis:
    """收敛分析类"""

    @staticmethod
    def weighted_reward(v0: float, v_constraints: Sequence[float], thetas: Sequence[float],
                        mu_hat_star: Sequence[float]) -> float:
        """
        加权回报 v₀ - Σ μ̂*ₙ·max{vₙ - θₙ, 0}

        Args:
            v0: 任务价值
            v_constraints: 约束价值
            thetas: 约束阈值
            mu_hat_star: 非负权重

        Returns:
            加权回报
        """
        v = np.atleast_1d(np.asarray(v_constraints, dtype=float))
        theta = np.atleast_1d(np.asarray(thetas, dtype=float))
        mu_hat = np.atleast_1d(np.asarray(mu_hat_star, dtype=float))
        if not (v.shape == theta.shape == mu_hat.shape):
            raise ValidationError(f"长度不一致: v={v.size}, θ={theta.size}, μ̂={mu_hat.size}")
        if np.any(mu_hat < 0):
            raise ValidationError("μ̂* 必须非负")
        return float(v0 - mu_hat @ np.maximum(v - theta, 0.0))

    @staticmethod
    def penalized_reward(v0: float, v_constraints: Sequence[float], thetas: Sequence[float]) -> float:
        """v₀ - Σ max{vₙ - θₙ, 0}"""
        v = np.atleast_1d(np.asarray(v_constraints, dtype=float))
        return ConvergenceAnalysis.weighted_reward(v0, v, thetas, np.ones_like(v))

    @staticmethod
    def sigmoid_mu_hat(mu: Sequence[float]) -> np.ndarray:
        """μ̂ = σ(μ) / (1 - σ(μ))，恒等于 e^μ"""
        mu = np.asarray(mu, dtype=float)
        return expit(mu) / expit(-mu)

    @staticmethod
    def saddle_vector(saddle: SaddlePoint) -> np.ndarray:
        """(v₀*, ⟨r₁, d*⟩, ..., ⟨r_N, d*⟩, μ*)"""
        return np.concatenate([np.asarray(saddle.values, dtype=float), saddle.mu_star.mu])

    @staticmethod
    def trace_vectors(trace: CmdpTrace) -> np.ndarray:
        """每条记录的 (v₀, ..., v_N, μ)"""
        return np.hstack([trace.value_matrix(), trace.multiplier_matrix()])

    @staticmethod
    def distance_to_saddle(trace: CmdpTrace, saddle: SaddlePoint) -> np.ndarray:
        """
        在 (v₀, v_{1:N}, μ) 空间中到预言机鞍点的欧氏距离

        最优占用测度可能不唯一，因此不在占用测度空间比较。
        """
        if not saddle.is_feasible:
            raise ValidationError("预言机鞍点不可行，无法计算距离")
        target = ConvergenceAnalysis.saddle_vector(saddle)
        vectors = ConvergenceAnalysis.trace_vectors(trace)
        if vectors.shape[1] != target.size:
            raise ValidationError(f"轨迹维度 {vectors.shape[1]} 与鞍点维度 {target.size} 不一致")
        return np.linalg.norm(vectors - target, axis=1)

    @staticmethod
    def averaged_distance_to_saddle(trace: CmdpTrace, saddle: SaddlePoint) -> np.ndarray:
        """平均迭代点的距离序列（价值关于占用测度是线性的，直接平均价值即可）"""
        target = ConvergenceAnalysis.saddle_vector(saddle)
        averaged = running_average(ConvergenceAnalysis.trace_vectors(trace))
        return np.linalg.norm(averaged - target, axis=1)

    @staticmethod
    def tail_amplitude(series: Sequence[float], fraction: float = 0.2) -> float:
        """最后 fraction 比例记录的 max - min"""
        arr = np.asarray(series, dtype=float)
        if arr.size == 0:
            raise ValidationError("序列不能为空")
        if not 0 < fraction <= 1:
            raise ValidationError(f"比例必须在 (0, 1] 内，当前为 {fraction}")
        tail = arr[-max(1, int(np.ceil(fraction * arr.size))):]
        return float(tail.max() - tail.min())

    @staticmethod
    def window_amplitudes(series: Sequence[float], n_windows: int) -> np.ndarray:
        """把序列按顺序均分为 n_windows 个窗口（丢弃末尾余数），返回每个窗口的振幅"""
        arr = np.asarray(series, dtype=float)
        width = arr.size // int(n_windows) if n_windows > 0 else 0
        if width < 1:
            raise ValidationError(f"序列长度 {arr.size} 不足以分成 {n_windows} 个窗口")
        windows = arr[:width * n_windows].reshape(n_windows, width)
        return windows.max(axis=1) - windows.min(axis=1)

    @staticmethod
    def lic_diagnostic(series: Sequence[float], window_fraction: float = LIC_WINDOW_FRACTION,
                       tol: float = LIC_TOL_TOY) -> LicVerdict:
        """
        末迭代收敛判定

        末窗口的振幅与最后一个值都不超过 tol 时判为收敛。

        Args:
            series: 到鞍点的距离序列（或其它以零为目标的序列）
            window_fraction: 末窗口占比
            tol: 容差

        Returns:
            LicVerdict
        """
        arr = np.asarray(series, dtype=float)
        if not 0 < window_fraction <= 1:
            raise ValidationError(f"窗口比例必须在 (0, 1] 内，当前为 {window_fraction}")
        minimum = int(np.ceil(10.0 / window_fraction))
        if arr.size < minimum:
            raise ValidationError(f"序列长度 {arr.size} 小于 {minimum}")
        window = max(1, int(np.ceil(window_fraction * arr.size)))
        tail = arr[-window:]
        if not np.all(np.isfinite(tail)):
            return LicVerdict(LicStatus.OSCILLATING, float('inf'), float(arr[-1]), window)
        amplitude = float(tail.max() - tail.min())
        limit = float(arr[-1])
        converged = amplitude <= tol and abs(limit) <= tol
        return LicVerdict(LicStatus.CONVERGED if converged else LicStatus.OSCILLATING, amplitude, limit, window)

    @staticmethod
    def aic_diagnostic(series: Sequence[float], window_fraction: float = LIC_WINDOW_FRACTION,
                       tol: float = LIC_TOL_TOY) -> LicVerdict:
        """平均迭代收敛判定：对序列做滑动平均后再做末窗口判定"""
        return ConvergenceAnalysis.lic_diagnostic(running_average(np.asarray(series, dtype=float)),
                                                  window_fraction, tol)

    @staticmethod
    def estimate_mu_star_empirical(traces: List[CmdpTrace]) -> Multipliers:
        """非乐观基线各次运行最终 μ 的均值"""
        if not traces:
            raise ValidationError("至少需要一条轨迹")
        finals = np.array([trace.final_record().mu for trace in traces])
        return Multipliers(finals.mean(axis=0))


def constraint_values_at(trace: CmdpTrace, index: int = -1) -> np.ndarray:
    """某条记录的 (v₁, ..., v_N)"""
    return trace.records[index].values[1:]


def fitted_rate(series: Sequence[float]) -> Optional[float]:
    """距离序列严格为正且足够长时返回线性收敛率 α，否则 None"""
    arr = np.asarray(series, dtype=float)
    if arr.size < 10 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        return None
    alpha, _ = fit_linear_rate(arr)
    return alpha
