"""
占用测度空间求解器模块
凸 ReLOAD：在流多面体 K 上做欧氏乐观梯度下降，乘子做乐观投影梯度上升
"""

import logging

import numpy as np

from cmdp_layer import (
    Cmdp, FlowPolytope, OccupancyMeasure, lagrangian_gradients, occupancy_from_policy,
    policy_from_occupancy, values
)
from config.settings import OCCUPANCY_STEP_SCALE
from game_layer import BregmanGeometry, Domain, md_step, omd_step, skew_operator_norm
from utils.exceptions import ValidationError
from .solver_config import CmdpTrace, SolverConfig

logger = logging.getLogger(__name__)


def occupancy_step_size(cmdp: Cmdp) -> float:
    """
    η = 0.4 / L̂，L̂ 为拉格朗日梯度算子 (d, μ) ↦ (r_μ, -(Rd - θ)) 的 Lipschitz 常数估计

    无约束时算子在 d 上为常数，用 ‖r₀‖ 代替。
    """
    coupling = cmdp.constraint_rewards.reshape(cmdp.n_constraints, -1)
    lipschitz = skew_operator_norm(coupling, fallback=float(np.linalg.norm(cmdp.task_reward)))
    if lipschitz <= 0:
        return OCCUPANCY_STEP_SCALE
    return OCCUPANCY_STEP_SCALE / lipschitz


def reload_occupancy(cmdp: Cmdp, config: SolverConfig) -> CmdpTrace:
    """
    占用测度空间的 ReLOAD

    d^{k+1} = Π_K(d^k - η(2r_μ^k - r_μ^{k-1}))，μ^{k+1} = Π_[0,cap](μ^k + η(2v^k - v^{k-1} - θ))。
    初始点 config.occupancy_init（可不在 K 内）先投影到 K；未给出时取初始策略的占用测度。
    两个玩家共用步长 η（config.eta_occupancy 或 0.4 / L̂）。
    """
    polytope = FlowPolytope(cmdp)
    tol = config.projection_tol
    geometry = BregmanGeometry.euclidean(Domain.polytope(lambda z: polytope.project(z, tol=tol)))
    eta = float(config.eta_occupancy) if config.eta_occupancy is not None else occupancy_step_size(cmdp)

    if config.occupancy_init is not None:
        start = np.asarray(config.occupancy_init, dtype=float)
        if start.shape != (cmdp.n_states, cmdp.n_actions):
            raise ValidationError(f"初始占用测度形状 {start.shape} 与 CMDP 不一致")
    else:
        start = occupancy_from_policy(cmdp, config.initial_policy(cmdp)).d
    d = geometry.domain.project(start)
    mu = config.initial_multipliers(cmdp)
    theta = cmdp.thresholds

    trace = CmdpTrace(solver='reload-occ', space='occupancy', thresholds=theta.copy(), stride=config.stride)
    logger.info(f"reload-occ: 开始求解 {cmdp.name}，K={config.iterations}, η={eta:.6g}, 乐观={config.optimism}")

    def record(k: int):
        occupancy = OccupancyMeasure(d)
        trace.record(cmdp, k, occupancy, mu, values(cmdp, occupancy), policy_from_occupancy(occupancy))

    prev_grad_d, prev_grad_mu = None, None
    for k in range(config.iterations):
        if k % config.stride == 0:
            record(k)
        grad_d, grad_mu = lagrangian_gradients(cmdp, d, mu)
        if config.optimism:
            if prev_grad_d is None:
                prev_grad_d, prev_grad_mu = grad_d, grad_mu
            d_next = omd_step(geometry, d, grad_d, prev_grad_d, eta, eta)
            mu_step = 2.0 * grad_mu - prev_grad_mu
        else:
            d_next = md_step(geometry, d, grad_d, eta)
            mu_step = grad_mu
        prev_grad_d, prev_grad_mu = grad_d, grad_mu

        d = d_next
        mu = config.clip_mu(mu + eta * mu_step)

    record(config.iterations)
    final = trace.final_record()
    logger.info(f"reload-occ: 完成，v = {final.values}, μ = {final.mu}, 流残差 {final.diagnostics['flow_residual']:.3e}")
    return trace
