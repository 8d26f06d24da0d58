"""
蛮力验证模块
在策略单纯形网格上穷举，作为线性规划预言机的独立交叉检验（仅限极小实例）
"""

import itertools
import logging
from math import comb
from typing import Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from cmdp_layer import Cmdp, Multipliers, OccupancyMeasure, Policy, evaluate_all
from config.settings import (
    BRUTE_FORCE_CHUNK, BRUTE_FORCE_MAX_CELLS, BRUTE_FORCE_MAX_CONSTRAINTS,
    BRUTE_FORCE_MAX_GRID, BRUTE_FORCE_MU_BOUND
)
from utils.exceptions import ValidationError
from .lp_oracle import SaddlePoint, SaddleStatus

logger = logging.getLogger(__name__)

FEASIBILITY_SLACK = 1e-12


def simplex_grid(n_actions: int, resolution: int) -> np.ndarray:
    """分辨率为 1/resolution 的单纯形网格点（隔板法），形状 (C(res+A-1, A-1), A)"""
    points = []
    for bars in itertools.combinations(range(resolution + n_actions - 1), n_actions - 1):
        edges = (-1,) + bars + (resolution + n_actions - 1,)
        points.append([edges[i + 1] - edges[i] - 1 for i in range(n_actions)])
    return np.array(points, dtype=float) / resolution


def _grid_values(cmdp: Cmdp, grid: np.ndarray) -> np.ndarray:
    """对所有网格策略分批求 (v₀, ..., v_N)"""
    s = cmdp.n_states
    n_points = grid.shape[0]
    total = n_points ** s
    rewards = cmdp.rewards
    rhs = (1.0 - cmdp.gamma) * cmdp.initial_dist
    identity = np.eye(s)
    result = np.empty((total, rewards.shape[0]))

    for start in range(0, total, BRUTE_FORCE_CHUNK):
        flat = np.arange(start, min(start + BRUTE_FORCE_CHUNK, total))
        index = np.stack(np.unravel_index(flat, (n_points,) * s), axis=1)
        probs = grid[index]
        p_pi = np.einsum('bsa,sat->bst', probs, cmdp.kernel)
        system = np.swapaxes(identity - cmdp.gamma * p_pi, 1, 2)
        d_states = np.linalg.solve(system, np.broadcast_to(rhs[:, np.newaxis], (len(flat), s, 1)))[..., 0]
        d = d_states[:, :, np.newaxis] * probs
        result[flat] = np.einsum('nsa,bsa->bn', rewards, d)
    return result


def _dual_function(grid_values: np.ndarray, thresholds: np.ndarray):
    """g(μ) = max_网格 [v₀ - Σ μₙ(vₙ - θₙ)]"""
    slack = grid_values[:, 1:] - thresholds

    def g(mu: np.ndarray) -> float:
        return float(np.max(grid_values[:, 0] - slack @ mu))

    return g


def _minimize_dual(g, n_constraints: int) -> Tuple[np.ndarray, float]:
    bound = (0.0, BRUTE_FORCE_MU_BOUND)
    if n_constraints == 0:
        return np.zeros(0), g(np.zeros(0))
    if n_constraints == 1:
        res = minimize_scalar(lambda m: g(np.array([m])), bounds=bound, method='bounded',
                              options={'xatol': 1e-9})
        return np.array([res.x]), float(res.fun)

    def inner(m1: float):
        return minimize_scalar(lambda m2: g(np.array([m1, m2])), bounds=bound, method='bounded',
                               options={'xatol': 1e-7})

    outer = minimize_scalar(lambda m1: inner(m1).fun, bounds=bound, method='bounded',
                            options={'xatol': 1e-7})
    best_inner = inner(outer.x)
    return np.array([outer.x, best_inner.x]), float(best_inner.fun)


def brute_force_verify(cmdp: Cmdp, resolution: int) -> SaddlePoint:
    """
    穷举网格策略求约束最优值，并由网格对偶函数的最小点估计 μ*

    与线性规划结果的差距应在 2/resolution 以内。

    Args:
        cmdp: 满足 S·A ≤ 6、N ≤ 2 的极小 CMDP
        resolution: 每个状态动作分布的网格分辨率

    Returns:
        SaddlePoint 估计（policy 字段为最优网格策略）
    """
    s, a, n_constraints = cmdp.n_states, cmdp.n_actions, cmdp.n_constraints
    if s * a > BRUTE_FORCE_MAX_CELLS:
        raise ValidationError(f"蛮力验证要求 S·A ≤ {BRUTE_FORCE_MAX_CELLS}，当前为 {s * a}")
    if n_constraints > BRUTE_FORCE_MAX_CONSTRAINTS:
        raise ValidationError(f"蛮力验证要求 N ≤ {BRUTE_FORCE_MAX_CONSTRAINTS}，当前为 {n_constraints}")
    if int(resolution) < 1:
        raise ValidationError(f"网格分辨率必须为正整数，当前为 {resolution}")
    resolution = int(resolution)
    grid_size = comb(resolution + a - 1, a - 1) ** s
    if grid_size > BRUTE_FORCE_MAX_GRID:
        raise ValidationError(f"网格规模 {grid_size} 超过上限 {BRUTE_FORCE_MAX_GRID:.0f}")

    logger.info(f"蛮力验证 {cmdp.name}: 分辨率 {resolution}, 共 {grid_size} 个网格策略")
    grid = simplex_grid(a, resolution)
    grid_values = _grid_values(cmdp, grid)

    feasible = np.all(grid_values[:, 1:] <= cmdp.thresholds + FEASIBILITY_SLACK, axis=1)
    if not np.any(feasible):
        logger.info("没有满足约束的网格策略")
        return SaddlePoint(
            d_star=OccupancyMeasure(np.zeros((s, a))),
            mu_star=Multipliers.zeros(n_constraints),
            primal_value=float('nan'),
            dual_value=float('nan'),
            status=SaddleStatus.INFEASIBLE,
            values=np.full(n_constraints + 1, np.nan),
            thresholds=cmdp.thresholds.copy(),
        )

    candidates = np.where(feasible, grid_values[:, 0], -np.inf)
    best = int(np.argmax(candidates))
    index = np.unravel_index(best, (grid.shape[0],) * s)
    policy = Policy(grid[list(index)])

    evaluation = evaluate_all(cmdp, policy)

    mu, dual_value = _minimize_dual(_dual_function(grid_values, cmdp.thresholds), n_constraints)
    return SaddlePoint(
        d_star=evaluation.occupancy,
        mu_star=Multipliers(np.maximum(mu, 0.0)),
        primal_value=float(grid_values[best, 0]),
        dual_value=dual_value,
        status=SaddleStatus.OPTIMAL,
        values=grid_values[best].copy(),
        thresholds=cmdp.thresholds.copy(),
        policy=policy,
    )
