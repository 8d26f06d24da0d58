"""
镜像下降策略迭代求解器模块
ReLOAD-MDPI、μ-MDPI、PEG-MDPI、固定乘子标量化基线与迭代平均
"""

import logging
from dataclasses import replace
from typing import Optional, Tuple, Union

import numpy as np

from cmdp_layer import (
    Cmdp, Multipliers, OccupancyMeasure, Policy, PolicyEvaluation,
    evaluate_all, mixed_q, policy_from_occupancy
)
from game_layer import log_mirror_step, project_simplex
from utils.exceptions import ValidationError
from .solver_config import CmdpTrace, PolicyGeometry, SolverConfig

logger = logging.getLogger(__name__)

LOG_EVERY = 1000


class PolicyIterate:
    """
    策略玩家的内部状态

    负熵几何下保存对数概率，指数权重更新不会下溢；欧氏几何下保存概率本身。
    """

    def __init__(self, geometry: PolicyGeometry, state: np.ndarray):
        self.geometry = geometry
        self.state = state

    @classmethod
    def from_policy(cls, geometry: PolicyGeometry, policy: Policy) -> 'PolicyIterate':
        if geometry == PolicyGeometry.ENTROPY:
            with np.errstate(divide='ignore'):
                return cls(geometry, np.log(policy.probs))
        return cls(geometry, policy.probs.copy())

    @property
    def policy(self) -> Policy:
        if self.geometry == PolicyGeometry.ENTROPY:
            return Policy(np.exp(self.state))
        return Policy(self.state)

    def stepped(self, advantage: np.ndarray, eta_pi: float) -> 'PolicyIterate':
        """沿优势方向（最大化）走一步"""
        if self.geometry == PolicyGeometry.ENTROPY:
            return PolicyIterate(self.geometry, log_mirror_step(self.state, -advantage / eta_pi))
        return PolicyIterate(self.geometry, project_simplex(self.state + advantage / eta_pi))


def advantage(evaluation: PolicyEvaluation, mu: np.ndarray) -> np.ndarray:
    """a = q₀ - Σₙ μₙ qₙ = -q_μ"""
    return -mixed_q(evaluation.q[0], evaluation.q[1:], mu)


def _record(trace: CmdpTrace, cmdp: Cmdp, k: int, policy: Policy, evaluation: PolicyEvaluation, mu: np.ndarray):
    trace.record(cmdp, k, evaluation.occupancy, mu, evaluation.values, policy)


def _run_mdpi(cmdp: Cmdp, config: SolverConfig, optimistic: bool, name: str,
              fixed_mu: Optional[np.ndarray] = None) -> CmdpTrace:
    """
    MDPI 主循环

    每步先对 N+1 个奖励做精确策略评估，再用第 k 步的量同时更新策略与乘子。
    无约束时乐观项没有作用，直接退化为普通 MDPI。
    """
    theta = cmdp.thresholds
    optimistic = optimistic and cmdp.n_constraints > 0
    iterate = PolicyIterate.from_policy(config.geometry, config.initial_policy(cmdp))
    mu = fixed_mu.copy() if fixed_mu is not None else config.initial_multipliers(cmdp)
    trace = CmdpTrace(solver=name, space='policy', thresholds=theta.copy(), stride=config.stride)

    logger.info(f"{name}: 开始求解 {cmdp.name}，K={config.iterations}, η_π={config.eta_pi}, "
                f"η_μ={config.eta_mu}, 乐观={optimistic}")
    prev_adv, prev_v = None, None
    for k in range(config.iterations):
        policy = iterate.policy
        evaluation = evaluate_all(cmdp, policy)
        if k % config.stride == 0:
            _record(trace, cmdp, k, policy, evaluation, mu)

        adv = advantage(evaluation, mu)
        v = evaluation.values[1:]
        if optimistic and prev_adv is not None:
            adv_step = 2.0 * adv - prev_adv
            v_step = 2.0 * v - prev_v
        else:
            adv_step, v_step = adv, v
        prev_adv, prev_v = adv, v

        iterate = iterate.stepped(adv_step, config.eta_pi)
        if fixed_mu is None:
            mu = config.clip_mu(mu + config.eta_mu * (v_step - theta))

        if (k + 1) % LOG_EVERY == 0:
            logger.debug(f"{name}: 第 {k + 1} 步 v = {evaluation.values}, μ = {mu}")

    policy = iterate.policy
    evaluation = evaluate_all(cmdp, policy)
    _record(trace, cmdp, config.iterations, policy, evaluation, mu)
    logger.info(f"{name}: 完成，v = {evaluation.values}, μ = {mu}")
    return trace


def reload_mdpi(cmdp: Cmdp, config: SolverConfig) -> CmdpTrace:
    """
    ReLOAD-MDPI：乐观乘性权重策略更新与乐观投影梯度上升乘子更新

    π^{k+1} ∝ π^k·exp((2a^k - a^{k-1}) / η_π)，μ^{k+1} = max{μ^k + η_μ(2v^k - v^{k-1} - θ), 0}，
    其中 a^k = q₀^k - Σμₙ^k qₙ^k，首步取 a^{-1} = a^0。
    config.optimism 为 False 时与 mu_mdpi 逐位相同。
    """
    return _run_mdpi(cmdp, config, optimistic=config.optimism, name='reload-mdpi')


def mu_mdpi(cmdp: Cmdp, config: SolverConfig) -> CmdpTrace:
    """非乐观基线，忽略 config.optimism"""
    return _run_mdpi(cmdp, replace(config, optimism=False), optimistic=False, name='mu-mdpi')


def peg_mdpi(cmdp: Cmdp, config: SolverConfig) -> CmdpTrace:
    """
    PEG-MDPI：过去外梯度的策略迭代形式

    半步用上一次半步点处的梯度从 (π^k, μ^k) 出发，评估半步点后，
    全步用半步梯度再次从 (π^k, μ^k) 出发。policy_geometry 为 euclidean 时
    策略更新为逐状态的单纯形投影梯度步。
    """
    theta = cmdp.thresholds
    iterate = PolicyIterate.from_policy(config.geometry, config.initial_policy(cmdp))
    mu = config.initial_multipliers(cmdp)
    trace = CmdpTrace(solver='peg-mdpi', space='policy', thresholds=theta.copy(), stride=config.stride)
    plain = cmdp.n_constraints == 0

    logger.info(f"peg-mdpi: 开始求解 {cmdp.name}，K={config.iterations}, 几何 {config.policy_geometry}")
    half_adv, half_v = None, None
    for k in range(config.iterations):
        policy = iterate.policy
        if plain or k == 0 or k % config.stride == 0:
            evaluation = evaluate_all(cmdp, policy)
            if k % config.stride == 0:
                _record(trace, cmdp, k, policy, evaluation, mu)
            if k == 0:
                half_adv, half_v = advantage(evaluation, mu), evaluation.values[1:]

        if plain:
            iterate = iterate.stepped(advantage(evaluation, mu), config.eta_pi)
            continue

        half_iterate = iterate.stepped(half_adv, config.eta_pi)
        half_mu = config.clip_mu(mu + config.eta_mu * (half_v - theta))
        half_evaluation = evaluate_all(cmdp, half_iterate.policy)
        half_adv = advantage(half_evaluation, half_mu)
        half_v = half_evaluation.values[1:]

        iterate = iterate.stepped(half_adv, config.eta_pi)
        mu = config.clip_mu(mu + config.eta_mu * (half_v - theta))

    policy = iterate.policy
    evaluation = evaluate_all(cmdp, policy)
    _record(trace, cmdp, config.iterations, policy, evaluation, mu)
    logger.info(f"peg-mdpi: 完成，v = {evaluation.values}, μ = {mu}")
    return trace


def fixed_mu_solver(cmdp: Cmdp, mu_star: Union[Multipliers, np.ndarray], config: SolverConfig) -> CmdpTrace:
    """在固定乘子下的标量化奖励 r₀ - Σμ*ₙrₙ 上运行负熵 MDPI，μ 不更新"""
    mu_star = mu_star if isinstance(mu_star, Multipliers) else Multipliers(mu_star)
    if len(mu_star) != cmdp.n_constraints:
        raise ValidationError(f"固定乘子个数 {len(mu_star)} 与约束个数 {cmdp.n_constraints} 不一致")
    return _run_mdpi(cmdp, config, optimistic=False, name='fixed-mu', fixed_mu=mu_star.mu)


def extract_saddle_estimate(trace: CmdpTrace, averaged: bool = False
                            ) -> Tuple[Union[Policy, OccupancyMeasure], Multipliers]:
    """
    从轨迹取鞍点估计

    Args:
        trace: 非空轨迹
        averaged: False 取最后一条记录；True 取全部记录的均匀平均，
            策略在占用测度空间平均后再换回策略。平均要求逐步记录（stride = 1），
            否则记录点并非全部迭代，直接拒绝

    Returns:
        (策略或占用测度, 乘子)
    """
    if len(trace) == 0:
        raise ValidationError("轨迹为空")
    if not averaged:
        last = trace.final_record()
        primal = last.policy if trace.space == 'policy' and last.policy is not None else last.occupancy
        return primal, Multipliers(last.mu)

    if trace.stride != 1:
        raise ValidationError(f"平均估计需要逐步记录的轨迹，当前记录间隔为 {trace.stride}")

    mean_d = trace.occupancy_stack().mean(axis=0)
    mean_mu = trace.multiplier_matrix().mean(axis=0)
    if trace.space == 'policy':
        return policy_from_occupancy(mean_d), Multipliers(mean_mu)
    return OccupancyMeasure(mean_d), Multipliers(mean_mu)
