"""
流多面体投影模块
占用测度可行集 K = {d ≥ 0, A d = (1-γ)ρ} 上的欧氏投影（Dykstra 交替投影）
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from config.settings import DYKSTRA_MAX_SWEEPS, DYKSTRA_TOL
from utils.exceptions import ConvergenceError, ValidationError
from .cmdp import Cmdp, OccupancyMeasure

logger = logging.getLogger(__name__)


def flow_matrix(cmdp: Cmdp) -> np.ndarray:
    """
    流约束矩阵，形状 (S, S·A)

    A[s, (s', a')] = 1{s' = s} - γ P(s | s', a')，列按 (s', a') 行优先排列。
    """
    s, a = cmdp.n_states, cmdp.n_actions
    selector = np.repeat(np.eye(s), a, axis=1)
    transitions = cmdp.kernel.reshape(s * a, s).T
    return selector - cmdp.gamma * transitions


def flow_rhs(cmdp: Cmdp) -> np.ndarray:
    return (1.0 - cmdp.gamma) * cmdp.initial_dist


def flow_residual(cmdp: Cmdp, d: Union[OccupancyMeasure, np.ndarray]) -> float:
    """max_s |Σ_a d(s, a) - (1-γ)ρ(s) - γ Σ P(s|s', a') d(s', a')|"""
    d = d.d if isinstance(d, OccupancyMeasure) else np.asarray(d, dtype=float)
    inflow = np.einsum('sat,sa->t', cmdp.kernel, d)
    residual = d.sum(axis=1) - flow_rhs(cmdp) - cmdp.gamma * inflow
    return float(np.max(np.abs(residual)))


class FlowPolytope:
    """缓存流约束矩阵及其法方程 AAᵀ 的 LU 分解"""

    def __init__(self, cmdp: Cmdp):
        self.shape = (cmdp.n_states, cmdp.n_actions)
        self.matrix = flow_matrix(cmdp)
        self.rhs = flow_rhs(cmdp)
        # γ < 1 时 A 行满秩，AAᵀ 正定
        self._normal_lu = lu_factor(self.matrix @ self.matrix.T)
        self.last_sweeps = 0

    def residual(self, z: np.ndarray) -> float:
        flat = np.asarray(z, dtype=float).reshape(-1)
        return float(np.max(np.abs(self.matrix @ flat - self.rhs)))

    def project_affine(self, z: np.ndarray) -> np.ndarray:
        """投影到仿射子空间 {A d = b}: z - Aᵀ(AAᵀ)⁻¹(Az - b)"""
        flat = np.asarray(z, dtype=float).reshape(-1)
        correction = lu_solve(self._normal_lu, self.matrix @ flat - self.rhs)
        return (flat - self.matrix.T @ correction).reshape(self.shape)

    def project(self, z: np.ndarray, tol: float = DYKSTRA_TOL,
                max_sweeps: int = DYKSTRA_MAX_SWEEPS) -> np.ndarray:
        """
        Dykstra 交替投影求 K 上的欧氏投影

        Args:
            z: 形状 (S, A) 的任意有限数组
            tol: 相邻两轮迭代差与两集合间隙的收敛容差
            max_sweeps: 最大轮数

        Returns:
            K 中距离 z 最近的点
        """
        z = np.asarray(z, dtype=float)
        if z.shape != self.shape:
            raise ValidationError(f"投影输入形状 {z.shape} 与 {self.shape} 不一致")
        if not np.all(np.isfinite(z)):
            raise ValidationError("投影输入包含非有限值")

        x = z.copy()
        p = np.zeros_like(z)
        q = np.zeros_like(z)
        for sweep in range(1, max_sweeps + 1):
            y = self.project_affine(x + p)
            p = x + p - y
            x_new = np.maximum(y + q, 0.0)
            q = y + q - x_new

            change = np.max(np.abs(x_new - x))
            gap = np.max(np.abs(y - x_new))
            x = x_new
            if change < tol and gap < tol:
                self.last_sweeps = sweep
                return x

        self.last_sweeps = max_sweeps
        residual = self.residual(x)
        raise ConvergenceError(f"Dykstra 投影在 {max_sweeps} 轮后未收敛，流残差 {residual:.3e}",
                               residual=residual)


def project_onto_K(cmdp: Cmdp, z: np.ndarray, tol: float = DYKSTRA_TOL,
                   polytope: Optional[FlowPolytope] = None) -> OccupancyMeasure:
    """z 在占用测度可行集 K 上的欧氏投影"""
    polytope = polytope or FlowPolytope(cmdp)
    d = polytope.project(z, tol=tol)
    logger.debug(f"投影到 K 用了 {polytope.last_sweeps} 轮")
    return OccupancyMeasure(d)
