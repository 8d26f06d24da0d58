"""
修正单纯形法模块
稠密两阶段修正单纯形法（Bland 规则防循环），求解 max cᵀx s.t. A_eq x = b_eq, A_ub x ≤ b_ub, x ≥ 0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from config.settings import (
    DEGENERACY_TOL, SIMPLEX_FEASIBILITY_TOL, SIMPLEX_MAX_ITER_FACTOR,
    SIMPLEX_OPTIMALITY_TOL, SIMPLEX_PIVOT_TOL, SIMPLEX_RATIO_TIE_TOL
)
from utils.exceptions import LpCyclingError, ValidationError

logger = logging.getLogger(__name__)

# 每隔若干次换基重新求逆，抑制乘积形式更新的误差累积
REINVERT_EVERY = 50


class LpStatus(Enum):
    """线性规划求解状态"""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(eq=False)
class LpSolution:
    """
    线性规划解

    Args:
        status: 求解状态
        x: 原始变量（不含松弛变量）
        objective: 目标值 cᵀx
        eq_duals: 等式行的对偶变量
        ub_duals: 不等式行的对偶变量（最大化问题中非负）
        reduced_costs: 原始变量与松弛变量的检验数
        basis: 最终基变量下标
        degenerate: 是否存在取值为零的基变量
        iterations: 两阶段总换基次数
    """
    status: LpStatus
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = float('nan')
    eq_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ub_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: List[int] = field(default_factory=list)
    degenerate: bool = False
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


def _as_block(matrix: Optional[np.ndarray], rhs: Optional[np.ndarray], n: int, name: str) -> Tuple[np.ndarray, np.ndarray]:
    if matrix is None:
        return np.zeros((0, n)), np.zeros(0)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float)).reshape(-1)
    if matrix.shape[1] != n or matrix.shape[0] != rhs.size:
        raise ValidationError(f"{name} 的形状 {matrix.shape} 与右端项长度 {rhs.size} 或变量个数 {n} 不一致")
    return matrix, rhs


class RevisedSimplex:
    """两阶段修正单纯形求解器"""

    def __init__(self, pivot_tol: float = SIMPLEX_PIVOT_TOL,
                 feasibility_tol: float = SIMPLEX_FEASIBILITY_TOL,
                 optimality_tol: float = SIMPLEX_OPTIMALITY_TOL,
                 max_iterations: Optional[int] = None):
        self.pivot_tol = pivot_tol
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations
        self.iterations = 0

    def solve(self, c: np.ndarray, a_eq: Optional[np.ndarray] = None, b_eq: Optional[np.ndarray] = None,
              a_ub: Optional[np.ndarray] = None, b_ub: Optional[np.ndarray] = None) -> LpSolution:
        """
        求解 max cᵀx s.t. A_eq x = b_eq, A_ub x ≤ b_ub, x ≥ 0

        Returns:
            LpSolution，对偶变量满足 yᵀA ≥ c（检验数非正）
        """
        c = np.atleast_1d(np.asarray(c, dtype=float)).reshape(-1)
        n = c.size
        a_eq, b_eq = _as_block(a_eq, b_eq, n, 'A_eq')
        a_ub, b_ub = _as_block(a_ub, b_ub, n, 'A_ub')
        m_eq, m_ub = a_eq.shape[0], a_ub.shape[0]
        m = m_eq + m_ub
        if not all(np.all(np.isfinite(arr)) for arr in (c, a_eq, b_eq, a_ub, b_ub)):
            raise ValidationError("线性规划数据含有非有限值")

        # 标准形: [A_eq 0; A_ub I] [x; s] = b，行符号归一使 b ≥ 0
        n_struct = n + m_ub
        a_std = np.zeros((m, n_struct))
        a_std[:m_eq, :n] = a_eq
        a_std[m_eq:, :n] = a_ub
        a_std[m_eq:, n:] = np.eye(m_ub)
        b_std = np.concatenate([b_eq, b_ub])
        signs = np.where(b_std < 0, -1.0, 1.0)
        a_std *= signs[:, np.newaxis]
        b_std = b_std * signs

        # 第一阶段: 每行一个人工变量
        a_full = np.hstack([a_std, np.eye(m)])
        n_total = n_struct + m
        self.iterations = 0
        limit = self.max_iterations or SIMPLEX_MAX_ITER_FACTOR * max(n_total + m, 1)

        phase1_cost = np.zeros(n_total)
        phase1_cost[n_struct:] = -1.0
        basis = list(range(n_struct, n_total))
        allowed = np.ones(n_total, dtype=bool)
        status, basis, b_inv = self._iterate(a_full, b_std, phase1_cost, basis, allowed, limit)

        x_b = b_inv @ b_std
        infeasibility = float(sum(x_b[i] for i, j in enumerate(basis) if j >= n_struct))
        scale = max(1.0, float(np.max(np.abs(b_std))) if m else 1.0)
        if infeasibility > self.feasibility_tol * scale:
            logger.info(f"第一阶段目标 {infeasibility:.3e}，问题不可行")
            return LpSolution(status=LpStatus.INFEASIBLE, basis=list(basis), iterations=self.iterations)

        rows = np.arange(m)
        a_full, b_std, rows, basis, b_inv = self._drive_out_artificials(a_full, b_std, rows, basis, b_inv, n_struct)

        # 第二阶段
        cost = np.zeros(n_total)
        cost[:n] = c
        allowed = np.zeros(n_total, dtype=bool)
        allowed[:n_struct] = True
        status, basis, b_inv = self._iterate(a_full, b_std, cost, basis, allowed, limit)
        if status == LpStatus.UNBOUNDED:
            logger.info("第二阶段发现无界方向")
            return LpSolution(status=LpStatus.UNBOUNDED, basis=list(basis), iterations=self.iterations)

        x_b = b_inv @ b_std
        x_full = np.zeros(n_total)
        x_full[basis] = np.maximum(x_b, 0.0)
        y_reduced = cost[basis] @ b_inv
        reduced_costs = cost[:n_struct] - y_reduced @ a_full[:, :n_struct]
        reduced_costs[[j for j in basis if j < n_struct]] = 0.0

        # 恢复被删除冗余行与符号翻转前的对偶
        duals = np.zeros(m)
        duals[rows] = y_reduced
        duals *= signs

        x = x_full[:n]
        degenerate = bool(np.any(np.abs(x_b) <= DEGENERACY_TOL))
        solution = LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            objective=float(c @ x),
            eq_duals=duals[:m_eq],
            ub_duals=duals[m_eq:],
            reduced_costs=reduced_costs,
            basis=[int(j) for j in basis],
            degenerate=degenerate,
            iterations=self.iterations,
        )
        logger.debug(f"单纯形法完成: 目标值 {solution.objective:.10g}，换基 {self.iterations} 次，退化={degenerate}")
        return solution

    def _invert(self, a: np.ndarray, basis: List[int]) -> np.ndarray:
        if not basis:
            return np.zeros((0, 0))
        return np.linalg.inv(a[:, basis])

    def _iterate(self, a: np.ndarray, b: np.ndarray, cost: np.ndarray, basis: List[int],
                 allowed: np.ndarray, limit: int):
        """Bland 规则下的单纯形迭代，返回 (状态, 基, 基逆)"""
        basis = list(basis)
        b_inv = self._invert(a, basis)
        since_inverse = 0

        while True:
            if since_inverse >= REINVERT_EVERY:
                b_inv = self._invert(a, basis)
                since_inverse = 0

            x_b = b_inv @ b
            y = cost[basis] @ b_inv
            reduced = cost - y @ a
            reduced[basis] = 0.0
            reduced[~allowed] = 0.0

            candidates = np.flatnonzero(reduced > self.optimality_tol)
            if candidates.size == 0:
                return LpStatus.OPTIMAL, basis, b_inv

            entering = int(candidates[0])
            direction = b_inv @ a[:, entering]
            positive = np.flatnonzero(direction > self.pivot_tol)
            if positive.size == 0:
                return LpStatus.UNBOUNDED, basis, b_inv

            ratios = np.maximum(x_b[positive], 0.0) / direction[positive]
            best = ratios.min()
            ties = positive[ratios <= best + SIMPLEX_RATIO_TIE_TOL]
            leaving = int(min(ties, key=lambda row: basis[row]))

            pivot = direction[leaving]
            b_inv[leaving] /= pivot
            others = np.arange(len(basis)) != leaving
            b_inv[others] -= np.outer(direction[others], b_inv[leaving])
            basis[leaving] = entering
            since_inverse += 1

            self.iterations += 1
            if self.iterations > limit:
                raise LpCyclingError(f"单纯形法超过 {limit} 次换基仍未终止", basis=basis)

    def _drive_out_artificials(self, a, b, rows, basis, b_inv, n_struct):
        """把零值人工变量换出基；无法换出的行是冗余行，直接删除"""
        position = 0
        while position < len(basis):
            if basis[position] < n_struct:
                position += 1
                continue
            row_view = b_inv[position] @ a[:, :n_struct]
            nonbasic = [j for j in range(n_struct) if j not in basis]
            pivots = [j for j in nonbasic if abs(row_view[j]) > self.pivot_tol]
            if pivots:
                basis[position] = pivots[0]
                b_inv = self._invert(a, basis)
                position += 1
                continue

            logger.debug(f"删除冗余约束行 {int(rows[position])}")
            artificial = basis[position]
            keep = np.arange(len(basis)) != position
            a = a[keep]
            b = b[keep]
            rows = rows[keep]
            basis = [j for k, j in enumerate(basis) if k != position]
            a[:, artificial] = 0.0
            b_inv = self._invert(a, basis)
        return a, b, rows, basis, b_inv


def solve_lp(c: np.ndarray, a_eq: Optional[np.ndarray] = None, b_eq: Optional[np.ndarray] = None,
             a_ub: Optional[np.ndarray] = None, b_ub: Optional[np.ndarray] = None, **kwargs) -> LpSolution:
    """便捷函数：用默认容差求解 max cᵀx"""
    return RevisedSimplex(**kwargs).solve(c, a_eq, b_eq, a_ub, b_ub)
