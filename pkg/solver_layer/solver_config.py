"""
求解器配置与轨迹模块
SolverConfig、CmdpTrace 以及初始策略的构造
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from cmdp_layer import Cmdp, Multipliers, OccupancyMeasure, Policy, flow_residual
from config.settings import (
    DEFAULT_ETA_MU, DEFAULT_ETA_PI, DEFAULT_ITERATIONS, DEFAULT_MU_CAP, DEFAULT_STRIDE, DYKSTRA_TOL
)
from env_layer import make_rng, sample_dirichlet
from utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


class PolicyGeometry(Enum):
    """策略玩家的镜像几何"""
    ENTROPY = "entropy"
    EUCLIDEAN = "euclidean"


class InitMode(Enum):
    """初始策略的生成方式"""
    UNIFORM = "uniform"
    RANDOM = "random"


@dataclass
class SolverConfig:
    """
    求解器配置

    Args:
        eta_pi: 策略温度，乘性权重更新为 π ∝ π·exp(优势 / eta_pi)
        eta_mu: 乘子步长，μ ← μ + eta_mu·(v - θ)
        iterations: 迭代次数 K
        stride: 记录间隔
        mu_init: 初始乘子，默认全零
        policy_init: 初始策略，默认由 init_mode 生成
        mu_cap: 乘子上界，None 表示无上界
        optimism: 是否使用乐观梯度
        seed: 随机种子（init_mode 为 random 时生效）
        init_mode: 初始策略生成方式
        policy_geometry: 策略更新的几何
        occupancy_init: 占用测度空间求解器的初始点（可以不在 K 内）
        eta_occupancy: 占用测度空间步长，None 表示取 0.4 / L̂
        projection_tol: 投影到 K 的容差
    """
    eta_pi: float = DEFAULT_ETA_PI
    eta_mu: float = DEFAULT_ETA_MU
    iterations: int = DEFAULT_ITERATIONS
    stride: int = DEFAULT_STRIDE
    mu_init: Optional[Union[Multipliers, np.ndarray, List[float]]] = None
    policy_init: Optional[Union[Policy, np.ndarray]] = None
    mu_cap: Optional[float] = DEFAULT_MU_CAP
    optimism: bool = True
    seed: int = 0
    init_mode: str = InitMode.UNIFORM.value
    policy_geometry: str = PolicyGeometry.ENTROPY.value
    occupancy_init: Optional[np.ndarray] = None
    eta_occupancy: Optional[float] = None
    projection_tol: float = DYKSTRA_TOL

    def __post_init__(self):
        for name in ('eta_pi', 'eta_mu'):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"步长 {name} 必须为正数，当前为 {value}")
            setattr(self, name, value)
        if int(self.iterations) < 1:
            raise ValidationError(f"迭代次数必须至少为 1，当前为 {self.iterations}")
        if int(self.stride) < 1:
            raise ValidationError(f"记录间隔必须至少为 1，当前为 {self.stride}")
        self.iterations = int(self.iterations)
        self.stride = int(self.stride)
        if self.mu_cap is not None and not float(self.mu_cap) > 0:
            raise ValidationError(f"乘子上界必须为正，当前为 {self.mu_cap}")
        if self.eta_occupancy is not None and not float(self.eta_occupancy) > 0:
            raise ValidationError(f"占用测度步长必须为正，当前为 {self.eta_occupancy}")
        if self.projection_tol <= 0:
            raise ValidationError("投影容差必须为正")
        try:
            PolicyGeometry(self.policy_geometry)
            InitMode(self.init_mode)
        except ValueError as e:
            raise ValidationError(str(e))
        if self.mu_init is not None and not isinstance(self.mu_init, Multipliers):
            self.mu_init = Multipliers(self.mu_init)
        if self.policy_init is not None and not isinstance(self.policy_init, Policy):
            self.policy_init = Policy(self.policy_init)

    @property
    def geometry(self) -> PolicyGeometry:
        return PolicyGeometry(self.policy_geometry)

    def initial_multipliers(self, cmdp: Cmdp) -> np.ndarray:
        if self.mu_init is None:
            return np.zeros(cmdp.n_constraints)
        if len(self.mu_init) != cmdp.n_constraints:
            raise ValidationError(f"初始乘子个数 {len(self.mu_init)} 与约束个数 {cmdp.n_constraints} 不一致")
        return self.clip_mu(self.mu_init.mu.copy())

    def initial_policy(self, cmdp: Cmdp) -> Policy:
        if self.policy_init is not None:
            if self.policy_init.shape != (cmdp.n_states, cmdp.n_actions):
                raise ValidationError(f"初始策略形状 {self.policy_init.shape} 与 CMDP 不一致")
            return self.policy_init
        return initial_policy(cmdp, self.init_mode, self.seed)

    def clip_mu(self, mu: np.ndarray) -> np.ndarray:
        """投影到 [0, mu_cap]"""
        upper = float(self.mu_cap) if self.mu_cap is not None else np.inf
        return np.clip(mu, 0.0, upper)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'eta_pi': self.eta_pi,
            'eta_mu': self.eta_mu,
            'iterations': self.iterations,
            'stride': self.stride,
            'mu_init': None if self.mu_init is None else self.mu_init.mu.tolist(),
            'policy_init': None if self.policy_init is None else self.policy_init.probs.tolist(),
            'mu_cap': self.mu_cap,
            'optimism': self.optimism,
            'seed': self.seed,
            'init_mode': self.init_mode,
            'policy_geometry': self.policy_geometry,
            'occupancy_init': None if self.occupancy_init is None else np.asarray(self.occupancy_init).tolist(),
            'eta_occupancy': self.eta_occupancy,
            'projection_tol': self.projection_tol,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SolverConfig':
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"未知的求解器参数: {sorted(unknown)}")
        return cls(**data)


def initial_policy(cmdp: Cmdp, mode: str = InitMode.UNIFORM.value, seed: int = 0) -> Policy:
    """均匀初始策略，或按种子采样 Dirichlet 行的随机初始策略"""
    mode = InitMode(mode) if not isinstance(mode, InitMode) else mode
    if mode == InitMode.UNIFORM:
        return Policy.uniform(cmdp.n_states, cmdp.n_actions)
    rng = make_rng(seed)
    return Policy(sample_dirichlet(rng, cmdp.n_states, cmdp.n_actions))


@dataclass(eq=False)
class CmdpRecord:
    """轨迹中的一条记录"""
    iteration: int
    occupancy: OccupancyMeasure
    mu: np.ndarray
    values: np.ndarray
    lagrangian: float
    policy: Optional[Policy] = None
    diagnostics: Dict[str, float] = field(default_factory=dict)


@dataclass(eq=False)
class CmdpTrace:
    """
    CMDP 求解轨迹

    在 k = 0、stride 的整数倍以及 k = K 处记录，共 ceil(K / stride) + 1 条。
    """
    solver: str
    space: str
    thresholds: np.ndarray
    stride: int = 1
    records: List[CmdpRecord] = field(default_factory=list)

    def record(self, cmdp: Cmdp, k: int, occupancy: OccupancyMeasure, mu: np.ndarray,
               value_vector: np.ndarray, policy: Optional[Policy] = None):
        mu = np.array(mu, dtype=float)
        slack = value_vector[1:] - self.thresholds
        diagnostics = {
            'constraint_violation': float(slack.max()) if slack.size else 0.0,
            'complementarity': float(mu @ slack),
            'flow_residual': flow_residual(cmdp, occupancy),
        }
        self.records.append(CmdpRecord(
            iteration=int(k),
            occupancy=OccupancyMeasure(occupancy.d.copy()),
            mu=mu,
            values=np.array(value_vector, dtype=float),
            lagrangian=float(-value_vector[0] + mu @ slack),
            policy=policy,
            diagnostics=diagnostics,
        ))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_constraints(self) -> int:
        return len(self.thresholds)

    def iterations(self) -> np.ndarray:
        return np.array([r.iteration for r in self.records], dtype=int)

    def value_matrix(self) -> np.ndarray:
        """形状 (记录数, N+1)"""
        return np.array([r.values for r in self.records])

    def multiplier_matrix(self) -> np.ndarray:
        """形状 (记录数, N)"""
        return np.array([r.mu for r in self.records]).reshape(len(self.records), self.n_constraints)

    def occupancy_stack(self) -> np.ndarray:
        return np.array([r.occupancy.d for r in self.records])

    def lagrangians(self) -> np.ndarray:
        return np.array([r.lagrangian for r in self.records])

    def final_record(self) -> CmdpRecord:
        if not self.records:
            raise ValidationError("轨迹为空")
        return self.records[-1]

    def to_frame(self) -> pd.DataFrame:
        """列: iter, v0..vN, mu1..muN, lagrangian 及各诊断量"""
        frame = pd.DataFrame({'iter': self.iterations()})
        value_matrix = self.value_matrix()
        for n in range(value_matrix.shape[1]):
            frame[f'v{n}'] = value_matrix[:, n]
        mu_matrix = self.multiplier_matrix()
        for n in range(self.n_constraints):
            frame[f'mu{n + 1}'] = mu_matrix[:, n]
        frame['lagrangian'] = self.lagrangians()
        diagnostics = pd.DataFrame([r.diagnostics for r in self.records])
        for column in diagnostics.columns:
            frame[column] = diagnostics[column].to_numpy()
        return frame
