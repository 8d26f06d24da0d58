"""
策略评估模块
精确的表格型策略评估、占用测度、价值、混合奖励与拉格朗日函数
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, lu_factor, lu_solve

from config.settings import ZERO_MASS_TOL
from utils.exceptions import NumericalError, ValidationError
from .cmdp import Cmdp, Multipliers, OccupancyMeasure, Policy, QValues

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[float]]


@dataclass(eq=False)
class PolicyEvaluation:
    """
    一次精确评估的全部结果

    Args:
        q: 各奖励的动作价值，形状 (N+1, S, A)
        v: 各奖励的状态价值，形状 (N+1, S)
        occupancy: 占用测度
        values: 归一化价值 ⟨rₙ, d_π⟩，形状 (N+1,)
    """
    q: np.ndarray
    v: np.ndarray
    occupancy: OccupancyMeasure
    values: np.ndarray
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def qvalues(self, n: int) -> QValues:
        return QValues(self.q[n], self.v[n], reward_index=n)


def _as_occupancy(d: Union[OccupancyMeasure, np.ndarray]) -> np.ndarray:
    if isinstance(d, OccupancyMeasure):
        return d.d
    return np.asarray(d, dtype=float)


def _as_mu(mu: Union[Multipliers, ArrayLike], n_constraints: int) -> np.ndarray:
    mu = mu.mu if isinstance(mu, Multipliers) else np.atleast_1d(np.asarray(mu, dtype=float)).reshape(-1)
    if mu.shape != (n_constraints,):
        raise ValidationError(f"乘子个数 {mu.size} 与约束个数 {n_constraints} 不一致")
    return mu


def _check_policy(cmdp: Cmdp, policy: Policy) -> np.ndarray:
    probs = policy.probs if isinstance(policy, Policy) else Policy(policy).probs
    if probs.shape != (cmdp.n_states, cmdp.n_actions):
        raise ValidationError(f"策略形状 {probs.shape} 与 CMDP {(cmdp.n_states, cmdp.n_actions)} 不一致")
    return probs


def policy_transition(cmdp: Cmdp, policy: Policy) -> np.ndarray:
    """策略诱导的状态转移矩阵 P_π(s, s') = Σ_a π(a|s) P(s'|s, a)"""
    probs = _check_policy(cmdp, policy)
    return np.einsum('sa,sat->st', probs, cmdp.kernel)


def _factorize(cmdp: Cmdp, p_pi: np.ndarray):
    system = np.eye(cmdp.n_states) - cmdp.gamma * p_pi
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', LinAlgWarning)
            return lu_factor(system)
    except (LinAlgError, LinAlgWarning, ValueError) as e:
        raise NumericalError(f"(I - γP_π) 的 LU 分解失败: {e}")


def evaluate_all(cmdp: Cmdp, policy: Policy) -> PolicyEvaluation:
    """
    对全部 N+1 个奖励做精确策略评估

    (I - γP_π) 只分解一次：正向求解得到价值，转置求解得到状态占用
    d_s = (1 - γ)ρ + γP_πᵀ d_s。

    Args:
        cmdp: 约束 MDP
        policy: 平稳策略

    Returns:
        PolicyEvaluation
    """
    probs = _check_policy(cmdp, policy)
    p_pi = np.einsum('sa,sat->st', probs, cmdp.kernel)
    lu = _factorize(cmdp, p_pi)

    rewards = cmdp.rewards
    r_pi = np.einsum('nsa,sa->ns', rewards, probs)
    v = lu_solve(lu, r_pi.T).T
    q = rewards + cmdp.gamma * np.einsum('sat,nt->nsa', cmdp.kernel, v)

    d_states = lu_solve(lu, (1.0 - cmdp.gamma) * cmdp.initial_dist, trans=1)
    d = np.maximum(d_states, 0.0)[:, np.newaxis] * probs

    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
        raise NumericalError("策略评估得到非有限值")

    values = np.einsum('nsa,sa->n', rewards, d)
    diagnostics = {
        # 未归一化的 ρᵀv₀
        'rho_value': float(cmdp.initial_dist @ v[0]),
        'occupancy_mass': float(d.sum()),
    }
    return PolicyEvaluation(q=q, v=v, occupancy=OccupancyMeasure(d), values=values, diagnostics=diagnostics)


def policy_eval(cmdp: Cmdp, policy: Policy, n: int = 0) -> QValues:
    """第 n 个奖励的 q 与 v（n = 0 为任务奖励）"""
    if not 0 <= int(n) <= cmdp.n_constraints:
        raise ValidationError(f"奖励下标 {n} 超出范围 [0, {cmdp.n_constraints}]")
    return evaluate_all(cmdp, policy).qvalues(int(n))


def occupancy_from_policy(cmdp: Cmdp, policy: Policy) -> OccupancyMeasure:
    return evaluate_all(cmdp, policy).occupancy


def policy_from_occupancy(d: Union[OccupancyMeasure, np.ndarray]) -> Policy:
    """
    π(a|s) = d(s, a) / Σ_a d(s, a)

    质量低于 ZERO_MASS_TOL 的状态取均匀分布。
    """
    d = np.maximum(_as_occupancy(d), 0.0)
    mass = d.sum(axis=1, keepdims=True)
    n_actions = d.shape[1]
    uniform = np.full_like(d, 1.0 / n_actions)
    safe_mass = np.where(mass < ZERO_MASS_TOL, 1.0, mass)
    probs = np.where(mass < ZERO_MASS_TOL, uniform, d / safe_mass)
    # 消除除法带来的行和误差
    probs = probs / probs.sum(axis=1, keepdims=True)
    return Policy(probs)


def values(cmdp: Cmdp, d: Union[OccupancyMeasure, np.ndarray]) -> np.ndarray:
    """(⟨r₀, d⟩, ⟨r₁, d⟩, ..., ⟨r_N, d⟩)"""
    d = _as_occupancy(d)
    if d.shape != (cmdp.n_states, cmdp.n_actions):
        raise ValidationError(f"占用测度形状 {d.shape} 与 CMDP 不一致")
    return np.einsum('nsa,sa->n', cmdp.rewards, d)


def value_of(cmdp: Cmdp, policy: Policy, n: int = 0) -> float:
    """策略价值 ⟨rₙ, d_π⟩"""
    if not 0 <= int(n) <= cmdp.n_constraints:
        raise ValidationError(f"奖励下标 {n} 超出范围 [0, {cmdp.n_constraints}]")
    return float(evaluate_all(cmdp, policy).values[int(n)])


def mixed_reward(cmdp: Cmdp, mu: Union[Multipliers, ArrayLike]) -> np.ndarray:
    """r_μ = -r₀ + Σₙ μₙ rₙ"""
    mu = _as_mu(mu, cmdp.n_constraints)
    return -cmdp.task_reward + np.einsum('n,nsa->sa', mu, cmdp.constraint_rewards)


def mixed_q(q0: np.ndarray, qs: Union[np.ndarray, Sequence[np.ndarray]],
            mu: Union[Multipliers, ArrayLike]) -> np.ndarray:
    """q_μ = -q₀ + Σₙ μₙ qₙ"""
    q0 = np.asarray(q0, dtype=float)
    if len(qs) == 0:
        qs = np.zeros((0,) + q0.shape)
    try:
        qs = np.asarray(qs, dtype=float)
    except ValueError as e:
        raise ValidationError(f"q 值形状不一致: {e}")
    if qs.ndim == q0.ndim:
        qs = qs[np.newaxis]
    if qs.shape[1:] != q0.shape:
        raise ValidationError(f"q 值形状不一致: {qs.shape[1:]} 与 {q0.shape}")
    mu = _as_mu(mu, qs.shape[0])
    return -q0 + np.einsum('n,nsa->sa', mu, qs)


def lagrangian(cmdp: Cmdp, d: Union[OccupancyMeasure, np.ndarray], mu: Union[Multipliers, ArrayLike]) -> float:
    """L(d, μ) = -⟨r₀, d⟩ + Σₙ μₙ(⟨rₙ, d⟩ - θₙ)"""
    mu = _as_mu(mu, cmdp.n_constraints)
    v = values(cmdp, d)
    return float(-v[0] + mu @ (v[1:] - cmdp.thresholds))


def lagrangian_gradients(cmdp: Cmdp, d: Union[OccupancyMeasure, np.ndarray],
                         mu: Union[Multipliers, ArrayLike]) -> Tuple[np.ndarray, np.ndarray]:
    """
    拉格朗日函数的梯度

    Returns:
        (∇_d L, ∇_μ L) = (r_μ, v_{1:N} - θ)
    """
    v = values(cmdp, d)
    return mixed_reward(cmdp, mu), v[1:] - cmdp.thresholds


def bellman_residual(cmdp: Cmdp, policy: Policy, qvalues: QValues) -> float:
    """max |q - (rₙ + γ P v)|，其中 v 为 q 在 π 下的平均"""
    probs = _check_policy(cmdp, policy)
    n = qvalues.reward_index
    v = np.sum(probs * qvalues.q, axis=1)
    target = cmdp.rewards[n] + cmdp.gamma * np.einsum('sat,t->sa', cmdp.kernel, v)
    return float(np.max(np.abs(qvalues.q - target)))
