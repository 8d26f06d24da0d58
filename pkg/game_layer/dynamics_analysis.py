"""
动力学分析模块
谱半径、谱范数估计与线性收敛率拟合
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config.settings import POWER_ITERATION_SEED, POWER_ITERATION_STEPS, POWER_ITERATION_TOL
from utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def singly_optimistic_jacobian(eta: float) -> np.ndarray:
    """单侧乐观动力学在状态 (x_k, y_k, y_{k-1}) 上的雅可比矩阵"""
    eta = float(eta)
    return np.array([
        [1.0, -2.0 * eta, eta],
        [eta, 1.0, 0.0],
        [0.0, 1.0, 0.0],
    ])


def singly_optimistic_spectral_radius(eta: float) -> float:
    """
    单侧乐观动力学雅可比矩阵的谱半径

    特征多项式 λ³ - 2λ² + (1 + 2η²)λ - η² 在 λ = 1 + δ 处平移为
    δ³ + δ² + 2η²δ + η²，平移后模长 |1 + δ| 在 η 很小时也能精确分辨。
    根由伴随矩阵特征值求得，再做几步复牛顿迭代修正。

    Args:
        eta: 步长，须非负

    Returns:
        最大特征值模长
    """
    eta = float(eta)
    if not np.isfinite(eta) or eta < 0:
        raise ValidationError(f"步长必须非负，当前为 {eta}")

    e2 = eta * eta
    coeffs = [1.0, 1.0, 2.0 * e2, e2]
    roots = np.roots(coeffs).astype(complex)

    for _ in range(3):
        value = ((roots + 1.0) * roots + 2.0 * e2) * roots + e2
        slope = (3.0 * roots + 2.0) * roots + 2.0 * e2
        safe = slope != 0
        roots[safe] = roots[safe] - value[safe] / slope[safe]

    # |1 + δ|² = 1 + 2Re δ + |δ|²
    shifted = 2.0 * roots.real + np.abs(roots) ** 2
    return float(np.sqrt(1.0 + shifted.max()))


def estimate_spectral_norm(matrix: np.ndarray, steps: int = POWER_ITERATION_STEPS,
                           tol: float = POWER_ITERATION_TOL,
                           seed: int = POWER_ITERATION_SEED) -> float:
    """
    幂迭代估计谱范数 ‖M‖₂

    Args:
        matrix: 实矩阵
        steps: 最大迭代步数
        tol: 相对收敛容差
        seed: 初始向量的随机种子

    Returns:
        最大奇异值估计
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.size == 0 or not np.any(m):
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0

    for step in range(steps):
        w = m.T @ (m @ v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            return 0.0
        v = w / norm_w
        sigma_new = float(np.linalg.norm(m @ v))
        if abs(sigma_new - sigma) <= tol * sigma_new:
            sigma = sigma_new
            logger.debug(f"幂迭代在第 {step + 1} 步收敛，谱范数 {sigma:.6g}")
            break
        sigma = sigma_new

    return sigma


def fit_linear_rate(distances: Sequence[float]) -> Tuple[float, float]:
    """
    对距离序列后半段做 log d_k = a - k log α 的最小二乘拟合

    Args:
        distances: 严格为正的距离序列，长度至少 10

    Returns:
        (alpha, r_squared)，alpha = exp(-斜率)。保留斜率符号：alpha > 1 表示线性收敛，
        alpha < 1 表示几何发散，不取斜率绝对值
    """
    d = np.asarray(distances, dtype=float)
    if d.ndim != 1 or len(d) < 10:
        raise ValidationError(f"拟合至少需要 10 个点，当前为 {d.size}")
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise ValidationError("拟合要求所有距离严格为正")

    k = np.arange(len(d), dtype=float)
    half = len(d) // 2
    log_d = np.log(d[half:])

    if np.ptp(log_d) == 0:
        return 1.0, 1.0

    fit = stats.linregress(k[half:], log_d)
    alpha = float(np.exp(-fit.slope))
    r_squared = float(fit.rvalue ** 2)
    return alpha, r_squared


def skew_operator_norm(coupling: np.ndarray, fallback: Optional[float] = None) -> float:
    """
    双线性鞍点算子 [[0, Cᵀ], [-C, 0]] 的 Lipschitz 常数估计

    耦合矩阵为空或为零时返回 fallback。
    """
    c = np.atleast_2d(np.asarray(coupling, dtype=float))
    if c.size == 0 or not np.any(c):
        return float(fallback) if fallback is not None else 0.0
    rows, cols = c.shape
    stacked = np.zeros((rows + cols, rows + cols))
    stacked[:cols, cols:] = c.T
    stacked[cols:, :cols] = -c
    return estimate_spectral_norm(stacked)
