"""
基准环境模块
悖论双状态 CMDP、带约束的 Catch、随机 CMDP 与极端阈值变体
"""

import logging
from typing import Tuple

import numpy as np

from cmdp_layer import Cmdp
from config.settings import (
    CATCH_COLS, CATCH_CONSTRAINED_COLUMNS, CATCH_CONSTRAINT_REWARD, CATCH_EPISODE_BUDGET,
    CATCH_GAMMA, CATCH_ROWS, PARADOX_GAMMA, PARADOX_THRESHOLD, RANDOM_CMDP_GAMMA
)
from oracle_layer import achievable_range
from utils.exceptions import ValidationError
from .prng import make_rng, sample_dirichlet

logger = logging.getLogger(__name__)

# Catch 动作
LEFT, STAY, RIGHT = 0, 1, 2


def paradoxical_cmdp(gamma: float = PARADOX_GAMMA, threshold: float = PARADOX_THRESHOLD) -> Cmdp:
    """
    双状态双动作 CMDP，约束奖励等于任务奖励

    a₁ 从任意状态转到 s₁ 并获得奖励 1，a₂ 转到 s₂ 且奖励为 0。
    """
    kernel = np.zeros((2, 2, 2))
    kernel[:, 0, 0] = 1.0
    kernel[:, 1, 1] = 1.0
    reward = np.array([[1.0, 0.0], [1.0, 0.0]])
    return Cmdp(
        kernel=kernel,
        task_reward=reward,
        constraint_rewards=reward[np.newaxis].copy(),
        thresholds=[threshold],
        gamma=gamma,
        initial_dist=np.full(2, 0.5),
        name='paradox',
    )


def catch_state_index(row: int, ball_col: int, paddle_col: int, cols: int) -> int:
    """状态 (球所在行, 球所在列, 挡板列) 的编号"""
    return (row * cols + ball_col) * cols + paddle_col


def catch_mirror_permutation(rows: int, cols: int) -> np.ndarray:
    """左右镜像后的状态编号"""
    perm = np.empty(rows * cols * cols, dtype=int)
    for r in range(rows):
        for c in range(cols):
            for p in range(cols):
                perm[catch_state_index(r, c, p, cols)] = catch_state_index(r, cols - 1 - c, cols - 1 - p, cols)
    return perm


def constrained_catch(rows: int = CATCH_ROWS, cols: int = CATCH_COLS, gamma: float = CATCH_GAMMA,
                      constraint_reward: float = CATCH_CONSTRAINT_REWARD,
                      constrained_columns: int = CATCH_CONSTRAINED_COLUMNS,
                      episode_budget: float = CATCH_EPISODE_BUDGET) -> Cmdp:
    """
    表格型 Catch：球从顶行随机列落下，挡板左右移动接球

    到达底行后转移给出 ±1 的任务奖励并重置为初始分布（球在顶行随机列，挡板居中），
    回合被拼接成一条无限长的折扣链。挡板位于最左 constrained_columns 列时
    约束奖励为 constraint_reward；阈值取每回合预算除以行数。

    Args:
        rows: 行数，至少 2
        cols: 列数，至少 3
        gamma: 折扣因子
        constraint_reward: 约束区域内的约束奖励
        constrained_columns: 约束区域宽度
        episode_budget: 每回合约束预算

    Returns:
        Cmdp，共 rows·cols·cols 个状态、3 个动作
    """
    if rows < 2 or cols < 3:
        raise ValidationError(f"Catch 需要 rows ≥ 2 且 cols ≥ 3，当前为 {rows}×{cols}")
    if not 0 < constrained_columns <= cols:
        raise ValidationError(f"约束区域宽度 {constrained_columns} 超出列数 {cols}")

    n_states = rows * cols * cols
    n_actions = 3
    kernel = np.zeros((n_states, n_actions, n_states))
    task_reward = np.zeros((n_states, n_actions))
    constraint = np.zeros((n_states, n_actions))

    start_paddle = cols // 2
    initial_dist = np.zeros(n_states)
    for c in range(cols):
        initial_dist[catch_state_index(0, c, start_paddle, cols)] = 1.0 / cols

    for r in range(rows):
        for c in range(cols):
            for p in range(cols):
                s = catch_state_index(r, c, p, cols)
                if p < constrained_columns:
                    constraint[s, :] = constraint_reward
                for a in range(n_actions):
                    if r == rows - 1:
                        task_reward[s, a] = 1.0 if p == c else -1.0
                        kernel[s, a] = initial_dist
                    else:
                        moved = min(max(p + a - 1, 0), cols - 1)
                        kernel[s, a, catch_state_index(r + 1, c, moved, cols)] = 1.0

    logger.debug(f"构造 Catch: {rows}×{cols}，{n_states} 个状态")
    return Cmdp(
        kernel=kernel,
        task_reward=task_reward,
        constraint_rewards=constraint[np.newaxis],
        thresholds=[episode_budget / rows],
        gamma=gamma,
        initial_dist=initial_dist,
        name='catch',
    )


def random_cmdp(seed: int, n_states: int, n_actions: int, n_constraints: int,
                gamma: float = RANDOM_CMDP_GAMMA) -> Cmdp:
    """
    随机 CMDP：转移行服从平坦 Dirichlet，奖励服从 [0, 1] 均匀分布，
    阈值取各约束可达范围的中点，初始分布均匀
    """
    if min(n_states, n_actions) < 1 or n_constraints < 0:
        raise ValidationError(f"规模参数无效: S={n_states}, A={n_actions}, N={n_constraints}")

    rng = make_rng(seed)
    kernel = sample_dirichlet(rng, (n_states, n_actions), n_states)
    task_reward = rng.random((n_states, n_actions))
    constraint_rewards = rng.random((n_constraints, n_states, n_actions))

    cmdp = Cmdp(
        kernel=kernel,
        task_reward=task_reward,
        constraint_rewards=constraint_rewards,
        thresholds=np.zeros(n_constraints),
        gamma=gamma,
        initial_dist=np.full(n_states, 1.0 / n_states),
        name=f'random-{seed}',
    )
    thresholds = [0.5 * sum(achievable_range(cmdp, n)) for n in range(n_constraints)]
    return cmdp.with_thresholds(thresholds)


def with_threshold(cmdp: Cmdp, n: int, theta: float) -> Cmdp:
    """替换第 n 个约束（从 0 开始）的阈值"""
    if not 0 <= n < cmdp.n_constraints:
        raise ValidationError(f"约束下标 {n} 超出范围 [0, {cmdp.n_constraints})")
    thresholds = cmdp.thresholds.copy()
    thresholds[n] = float(theta)
    return cmdp.with_thresholds(thresholds)


def extreme_threshold_variants(cmdp: Cmdp, n: int) -> Tuple[Cmdp, Cmdp]:
    """阈值分别取可达范围最小值与最大值的两个副本"""
    low, high = achievable_range(cmdp, n)
    return with_threshold(cmdp, n, low), with_threshold(cmdp, n, high)
