"""
线性规划预言机模块
在占用测度上求解 CMDP 线性规划，给出鞍点 (d*, μ*) 与阈值分类
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from cmdp_layer import Cmdp, Multipliers, OccupancyMeasure, Policy, flow_matrix, flow_rhs, values
from config.settings import EXTREME_THRESHOLD_FRACTION
from utils.exceptions import OracleError, ValidationError
from .revised_simplex import LpStatus, RevisedSimplex

logger = logging.getLogger(__name__)

CERTIFICATE_TOL = 1e-8


class SaddleStatus(Enum):
    """预言机状态"""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    THRESHOLD_EXTREME = "threshold_extreme"


class ThresholdClass(Enum):
    """约束阈值在可达范围中的位置"""
    EXTREME_LOW = "extreme_low"
    EXTREME_HIGH = "extreme_high"
    INTERMEDIATE = "intermediate"


@dataclass(eq=False)
class SaddlePoint:
    """
    鞍点 (d*, μ*) 及其原始/对偶目标值

    Args:
        d_star: 最优占用测度
        mu_star: 最优乘子
        primal_value: 最优任务价值 v₀*
        dual_value: 对偶目标值
        status: 预言机状态
        values: (v₀*, ⟨r₁, d*⟩, ..., ⟨r_N, d*⟩)
        thresholds: 求解时的约束阈值
        degenerate: 是否存在取值为零的基变量
        threshold_classes: 各约束的阈值分类
        policy: 蛮力验证时得到的最优网格策略
    """
    d_star: OccupancyMeasure
    mu_star: Multipliers
    primal_value: float
    dual_value: float
    status: SaddleStatus
    values: np.ndarray
    thresholds: np.ndarray
    degenerate: bool = False
    threshold_classes: List[ThresholdClass] = field(default_factory=list)
    policy: Optional[Policy] = None

    @property
    def is_feasible(self) -> bool:
        return self.status != SaddleStatus.INFEASIBLE

    @property
    def duality_gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    def is_certified(self, tol: float = CERTIFICATE_TOL) -> bool:
        """强对偶、互补松弛与约束可行性同时成立"""
        if not self.is_feasible:
            return False
        slack = self.values[1:] - self.thresholds
        return bool(self.duality_gap <= tol
                    and np.all(np.abs(self.mu_star.mu * slack) <= tol)
                    and np.all(slack <= tol))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status.value,
            'primal_value': self.primal_value,
            'dual_value': self.dual_value,
            'd_star': self.d_star.flat().tolist(),
            'mu_star': self.mu_star.mu.tolist(),
            'values': np.asarray(self.values).tolist(),
            'degenerate': self.degenerate,
            'threshold_classes': [c.value for c in self.threshold_classes],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _infeasible(cmdp: Cmdp) -> SaddlePoint:
    nan_values = np.full(cmdp.n_constraints + 1, np.nan)
    return SaddlePoint(
        d_star=OccupancyMeasure(np.zeros((cmdp.n_states, cmdp.n_actions))),
        mu_star=Multipliers.zeros(cmdp.n_constraints),
        primal_value=float('nan'),
        dual_value=float('nan'),
        status=SaddleStatus.INFEASIBLE,
        values=nan_values,
        thresholds=cmdp.thresholds.copy(),
    )


def achievable_range(cmdp: Cmdp, n: int) -> Tuple[float, float]:
    """
    第 n 个约束（从 0 开始）在 K 上可达的 ⟨rₙ, d⟩ 范围

    Returns:
        (最小值, 最大值)
    """
    if not 0 <= n < cmdp.n_constraints:
        raise ValidationError(f"约束下标 {n} 超出范围 [0, {cmdp.n_constraints})")
    reward = cmdp.constraint_rewards[n].reshape(-1)
    a_eq, b_eq = flow_matrix(cmdp), flow_rhs(cmdp)
    solver = RevisedSimplex()
    upper = solver.solve(reward, a_eq, b_eq)
    lower = solver.solve(-reward, a_eq, b_eq)
    if not (upper.is_optimal and lower.is_optimal):
        raise OracleError(f"约束 {n} 的辅助线性规划求解失败: {upper.status.value}/{lower.status.value}")
    return -lower.objective, upper.objective


def classify_threshold(cmdp: Cmdp, n: int, fraction: float = EXTREME_THRESHOLD_FRACTION,
                       value_range: Optional[Tuple[float, float]] = None) -> ThresholdClass:
    """阈值落在可达范围两端 fraction 比例之内时视为极端"""
    low, high = value_range if value_range is not None else achievable_range(cmdp, n)
    theta = float(cmdp.thresholds[n])
    margin = fraction * (high - low)
    if theta <= low + margin:
        return ThresholdClass.EXTREME_LOW
    if theta >= high - margin:
        return ThresholdClass.EXTREME_HIGH
    return ThresholdClass.INTERMEDIATE


def solve_cmdp_lp(cmdp: Cmdp, classify: bool = True) -> SaddlePoint:
    """
    求解 max ⟨r₀, d⟩ s.t. d ∈ K, ⟨rₙ, d⟩ ≤ θₙ

    μ* 取不等式行的最优对偶变量。

    Args:
        cmdp: 约束 MDP
        classify: 是否对各阈值分类（任一阈值极端时状态为 THRESHOLD_EXTREME）

    Returns:
        SaddlePoint
    """
    s, a, n_constraints = cmdp.n_states, cmdp.n_actions, cmdp.n_constraints
    logger.info(f"求解 {cmdp.name} 的线性规划: {s} 个状态, {a} 个动作, {n_constraints} 个约束")

    a_eq, b_eq = flow_matrix(cmdp), flow_rhs(cmdp)
    a_ub = cmdp.constraint_rewards.reshape(n_constraints, s * a)
    b_ub = cmdp.thresholds
    solution = RevisedSimplex().solve(cmdp.task_reward.reshape(-1), a_eq, b_eq,
                                      a_ub if n_constraints else None, b_ub if n_constraints else None)

    if solution.status == LpStatus.INFEASIBLE:
        logger.warning(f"{cmdp.name} 的约束不可行")
        return _infeasible(cmdp)
    if solution.status != LpStatus.OPTIMAL:
        raise OracleError(f"{cmdp.name} 的线性规划状态异常: {solution.status.value}")

    d = OccupancyMeasure(np.maximum(solution.x, 0.0).reshape(s, a))
    ub_duals = solution.ub_duals if n_constraints else np.zeros(0)
    mu = Multipliers(np.maximum(ub_duals, 0.0))
    dual_value = float(b_eq @ solution.eq_duals + b_ub @ ub_duals)

    saddle = SaddlePoint(
        d_star=d,
        mu_star=mu,
        primal_value=solution.objective,
        dual_value=dual_value,
        status=SaddleStatus.OPTIMAL,
        values=values(cmdp, d),
        thresholds=cmdp.thresholds.copy(),
        degenerate=solution.degenerate,
    )
    if saddle.duality_gap > CERTIFICATE_TOL:
        logger.warning(f"对偶间隙 {saddle.duality_gap:.3e} 超过 {CERTIFICATE_TOL}")

    if classify and n_constraints:
        saddle.threshold_classes = [classify_threshold(cmdp, k) for k in range(n_constraints)]
        if any(c != ThresholdClass.INTERMEDIATE for c in saddle.threshold_classes):
            saddle.status = SaddleStatus.THRESHOLD_EXTREME

    logger.info(f"预言机: v₀* = {saddle.primal_value:.10g}, μ* = {mu.mu}, 状态 {saddle.status.value}")
    return saddle
