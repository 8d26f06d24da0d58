"""
约束 MDP 数据模型
CMDP、策略、占用测度、拉格朗日乘子与 Q 值的数据类，以及 JSON 读写
"""

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Sequence

import numpy as np

from config.settings import ZERO_MASS_TOL
from utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12


def atomic_write_text(path: str, text: str):
    """先写临时文件再改名"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp_', suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


@dataclass(eq=False)
class Cmdp:
    """
    表格型折扣约束 MDP

    Args:
        kernel: 转移核 P，形状 (S, A, S)
        task_reward: 任务奖励 r₀，形状 (S, A)
        constraint_rewards: 约束奖励 rₙ，形状 (N, S, A)
        thresholds: 约束阈值 θₙ，形状 (N,)
        gamma: 折扣因子，0 ≤ γ < 1
        initial_dist: 初始分布 ρ，形状 (S,)
        name: 名称
    """
    kernel: np.ndarray
    task_reward: np.ndarray
    constraint_rewards: np.ndarray
    thresholds: np.ndarray
    gamma: float
    initial_dist: np.ndarray
    name: str = 'cmdp'

    def __post_init__(self):
        self.kernel = np.asarray(self.kernel, dtype=float)
        self.task_reward = np.asarray(self.task_reward, dtype=float)
        if self.kernel.ndim != 3:
            raise ValidationError(f"转移核必须是三维数组，当前形状 {self.kernel.shape}")
        n_states, n_actions = self.kernel.shape[0], self.kernel.shape[1]
        constraint_rewards = np.asarray(self.constraint_rewards, dtype=float)
        if constraint_rewards.size == 0:
            constraint_rewards = np.zeros((0, n_states, n_actions))
        self.constraint_rewards = constraint_rewards
        self.thresholds = np.atleast_1d(np.asarray(self.thresholds, dtype=float)).reshape(-1)
        self.gamma = float(self.gamma)
        self.initial_dist = np.asarray(self.initial_dist, dtype=float)
        self.validate()

    @property
    def n_states(self) -> int:
        return self.kernel.shape[0]

    @property
    def n_actions(self) -> int:
        return self.kernel.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.constraint_rewards.shape[0]

    @property
    def rewards(self) -> np.ndarray:
        """按 (r₀, r₁, ..., r_N) 堆叠的奖励，形状 (N+1, S, A)"""
        return np.concatenate([self.task_reward[np.newaxis], self.constraint_rewards], axis=0)

    def validate(self):
        """检查全部不变量，失败时抛出 ValidationError"""
        s, a = self.n_states, self.n_actions
        if s < 1 or a < 1:
            raise ValidationError("状态数与动作数必须为正")
        if self.kernel.shape != (s, a, s):
            raise ValidationError(f"转移核形状应为 {(s, a, s)}，当前为 {self.kernel.shape}")
        if self.task_reward.shape != (s, a):
            raise ValidationError(f"任务奖励形状应为 {(s, a)}，当前为 {self.task_reward.shape}")
        if self.constraint_rewards.ndim != 3 or self.constraint_rewards.shape[1:] != (s, a):
            raise ValidationError(f"约束奖励形状应为 (N, {s}, {a})，当前为 {self.constraint_rewards.shape}")
        if self.thresholds.shape != (self.n_constraints,):
            raise ValidationError(f"阈值个数 {self.thresholds.size} 与约束个数 {self.n_constraints} 不一致")
        if self.initial_dist.shape != (s,):
            raise ValidationError(f"初始分布长度应为 {s}")

        arrays = [self.kernel, self.task_reward, self.constraint_rewards, self.thresholds, self.initial_dist]
        if not all(np.all(np.isfinite(arr)) for arr in arrays):
            raise ValidationError("CMDP 含有非有限值")
        if np.any(self.kernel < 0):
            raise ValidationError("转移概率必须非负")
        row_error = np.max(np.abs(self.kernel.sum(axis=2) - 1.0))
        if row_error > ROW_SUM_TOL:
            raise ValidationError(f"转移核行和偏离 1 达 {row_error:.3e}")
        if np.any(self.initial_dist < 0) or abs(self.initial_dist.sum() - 1.0) > ROW_SUM_TOL:
            raise ValidationError("初始分布必须是概率向量")
        if not 0.0 <= self.gamma < 1.0:
            raise ValidationError(f"折扣因子必须在 [0, 1) 内，当前为 {self.gamma}")

    def with_thresholds(self, thresholds: Sequence[float]) -> 'Cmdp':
        return replace(self, thresholds=np.array(thresholds, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'n_states': self.n_states,
            'n_actions': self.n_actions,
            'gamma': self.gamma,
            'rho': self.initial_dist.tolist(),
            'kernel': self.kernel.tolist(),
            'r0': self.task_reward.tolist(),
            'constraints': [
                {'reward': self.constraint_rewards[n].tolist(), 'threshold': float(self.thresholds[n])}
                for n in range(self.n_constraints)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Cmdp':
        required = ['n_states', 'n_actions', 'gamma', 'rho', 'kernel', 'r0']
        missing = [key for key in required if key not in data]
        if missing:
            raise ValidationError(f"CMDP 文件缺少字段: {missing}")
        n_states, n_actions = int(data['n_states']), int(data['n_actions'])
        constraints = data.get('constraints', [])
        rewards = [c['reward'] for c in constraints]
        cmdp = cls(
            kernel=data['kernel'],
            task_reward=data['r0'],
            constraint_rewards=np.array(rewards, dtype=float) if rewards else np.zeros((0, n_states, n_actions)),
            thresholds=[c['threshold'] for c in constraints],
            gamma=data['gamma'],
            initial_dist=data['rho'],
            name=data.get('name', 'cmdp'),
        )
        if cmdp.n_states != n_states or cmdp.n_actions != n_actions:
            raise ValidationError("声明的状态数或动作数与数组形状不一致")
        return cmdp

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def save_json(self, path: str):
        atomic_write_text(path, self.to_json(indent=2))
        logger.info(f"CMDP {self.name} 已保存到 {path}")

    @classmethod
    def load_json(cls, path: str) -> 'Cmdp':
        with open(path, 'r', encoding='utf-8') as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as e:
                raise ValidationError(f"无法解析 CMDP 文件 {path}: {e}")
        return cls.from_dict(data)


@dataclass(eq=False)
class Policy:
    """平稳随机策略 π(a|s)，每行是一个分布"""
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 2:
            raise ValidationError(f"策略必须是二维数组，当前形状 {probs.shape}")
        if not np.all(np.isfinite(probs)) or np.any(probs < -ZERO_MASS_TOL):
            raise ValidationError("策略概率必须非负且有限")
        if np.max(np.abs(probs.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValidationError("策略每行之和必须为 1")
        self.probs = np.maximum(probs, 0.0)

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> 'Policy':
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))

    @classmethod
    def deterministic(cls, actions: Sequence[int], n_actions: int) -> 'Policy':
        actions = np.asarray(actions, dtype=int)
        probs = np.zeros((len(actions), n_actions))
        probs[np.arange(len(actions)), actions] = 1.0
        return cls(probs)

    @property
    def shape(self):
        return self.probs.shape


@dataclass(eq=False)
class OccupancyMeasure:
    """折扣归一化的状态-动作占用测度 d(s, a)"""
    d: np.ndarray

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float)
        if self.d.ndim != 2:
            raise ValidationError(f"占用测度必须是二维数组，当前形状 {self.d.shape}")

    @property
    def total_mass(self) -> float:
        return float(self.d.sum())

    @property
    def state_occupancy(self) -> np.ndarray:
        return self.d.sum(axis=1)

    def flat(self) -> np.ndarray:
        return self.d.reshape(-1)


@dataclass(eq=False)
class Multipliers:
    """非负拉格朗日乘子 μ"""
    mu: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float)).reshape(-1)
        if not np.all(np.isfinite(self.mu)) or np.any(self.mu < 0):
            raise ValidationError(f"拉格朗日乘子必须非负，当前为 {self.mu}")

    @classmethod
    def zeros(cls, n_constraints: int) -> 'Multipliers':
        return cls(np.zeros(n_constraints))

    def __len__(self) -> int:
        return len(self.mu)


@dataclass(eq=False)
class QValues:
    """某一奖励下的动作价值 q(s, a) 与状态价值 v(s)"""
    q: np.ndarray
    v: np.ndarray
    reward_index: int = 0
