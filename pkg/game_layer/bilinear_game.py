"""
双线性博弈模块
定义凸凹双线性博弈、步长序列、迭代轨迹，以及 GDA/OGDA/MWU/OMWU/EG/PEG/RG/单侧乐观 动力学
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import DOMAIN_TOL
from utils.exceptions import ValidationError
from .dynamics_analysis import estimate_spectral_norm
from .geometry import BregmanGeometry, Domain, DomainKind, GeometryKind, md_step, omd_step

logger = logging.getLogger(__name__)


class GameAlgorithm(Enum):
    """博弈求解算法"""
    GDA = "gda"
    OGDA = "ogda"
    MWU = "mwu"
    OMWU = "omwu"
    EG = "eg"
    PEG = "peg"
    RG = "rg"
    SINGLY_OPTIMISTIC = "singly"

    @classmethod
    def parse(cls, value: Union['GameAlgorithm', str]) -> 'GameAlgorithm':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = [a.value for a in cls]
            raise ValidationError(f"未知算法 {value}，可选: {names}")


@dataclass(eq=False)
class BilinearGame:
    """
    min_x max_y xᵀMy + (m/2)(‖x‖² - ‖y‖²)

    Args:
        payoff_matrix: 收益矩阵 M
        x_domain: 最小化方的定义域
        y_domain: 最大化方的定义域
        strong_monotonicity: 强单调系数 m ≥ 0
    """
    payoff_matrix: np.ndarray
    x_domain: Domain = field(default_factory=Domain.free)
    y_domain: Domain = field(default_factory=Domain.free)
    strong_monotonicity: float = 0.0

    def __post_init__(self):
        self.payoff_matrix = np.atleast_2d(np.asarray(self.payoff_matrix, dtype=float))
        if self.payoff_matrix.ndim != 2 or not np.all(np.isfinite(self.payoff_matrix)):
            raise ValidationError("收益矩阵必须是有限的二维数组")
        m = float(self.strong_monotonicity)
        if not np.isfinite(m) or m < 0:
            raise ValidationError(f"强单调系数必须非负，当前为 {m}")
        self.strong_monotonicity = m

    @classmethod
    def xy_game(cls, strong_monotonicity: float = 0.0) -> 'BilinearGame':
        """min_x max_y xy"""
        return cls(np.array([[1.0]]), strong_monotonicity=strong_monotonicity)

    @classmethod
    def matching_pennies(cls) -> 'BilinearGame':
        """两个单纯形上的猜硬币博弈，唯一鞍点为均匀分布"""
        return cls(np.array([[1.0, -1.0], [-1.0, 1.0]]), x_domain=Domain.simplex(), y_domain=Domain.simplex())

    @property
    def n_x(self) -> int:
        return self.payoff_matrix.shape[0]

    @property
    def n_y(self) -> int:
        return self.payoff_matrix.shape[1]

    def operator(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """单调算子 B(x, y) = (My + m x, -Mᵀx + m y)，两个分量都是下降方向"""
        m = self.strong_monotonicity
        return self.payoff_matrix @ y + m * x, -self.payoff_matrix.T @ x + m * y

    def objective(self, x: np.ndarray, y: np.ndarray) -> float:
        m = self.strong_monotonicity
        return float(x @ self.payoff_matrix @ y + 0.5 * m * (x @ x - y @ y))

    def lipschitz_constant(self) -> float:
        """L = ‖M‖₂ + m"""
        return estimate_spectral_norm(self.payoff_matrix) + self.strong_monotonicity


@dataclass(eq=False)
class StepSchedule:
    """步长序列，超出长度后重复最后一个值"""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise ValidationError("步长序列不能为空")
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValidationError("步长必须全部为正")

    @classmethod
    def constant(cls, eta: float) -> 'StepSchedule':
        return cls(np.array([eta], dtype=float))

    @classmethod
    def bounded(cls, values: Sequence[float], epsilon: float, lipschitz: float) -> 'StepSchedule':
        """步长须位于 [ε, (1 - 2ε) / (2L)] 内"""
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if epsilon <= 0 or lipschitz <= 0:
            raise ValidationError("ε 与 L 必须为正")
        upper = (1.0 - 2.0 * epsilon) / (2.0 * lipschitz)
        if upper < epsilon:
            raise ValidationError(f"区间 [{epsilon}, {upper}] 为空")
        if np.any(values < epsilon) or np.any(values > upper):
            raise ValidationError(f"步长超出区间 [{epsilon}, {upper}]")
        return cls(values)

    def at(self, k: int) -> float:
        return float(self.values[min(k, len(self.values) - 1)])


@dataclass(eq=False)
class IterateTrace:
    """按固定间隔记录的迭代轨迹"""
    iterates: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    recorded_every: int = 1
    diagnostics: List[Dict[str, float]] = field(default_factory=list)
    iterations: List[int] = field(default_factory=list)
    algorithm: str = ''

    def record(self, k: int, x: np.ndarray, y: np.ndarray, diagnostics: Dict[str, float]):
        self.iterations.append(int(k))
        self.iterates.append((np.array(x, dtype=float), np.array(y, dtype=float)))
        self.diagnostics.append(dict(diagnostics))

    def __len__(self) -> int:
        return len(self.iterates)

    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.iterates])

    def ys(self) -> np.ndarray:
        return np.array([y for _, y in self.iterates])

    def norms(self) -> np.ndarray:
        """每条记录到原点的距离 ‖(x, y)‖"""
        return np.sqrt(np.sum(self.xs() ** 2, axis=1) + np.sum(self.ys() ** 2, axis=1))

    def to_frame(self) -> pd.DataFrame:
        xs, ys = self.xs(), self.ys()
        frame = pd.DataFrame({'iter': self.iterations})
        for i in range(xs.shape[1]):
            frame[f'x{i}' if xs.shape[1] > 1 else 'x'] = xs[:, i]
        for j in range(ys.shape[1]):
            frame[f'y{j}' if ys.shape[1] > 1 else 'y'] = ys[:, j]
        diag = pd.DataFrame(self.diagnostics)
        for column in diag.columns:
            frame[column] = diag[column].to_numpy()
        return frame


class _UpdateRule(ABC):
    """单步更新规则基类，两位玩家始终同时更新"""

    def __init__(self, game: BilinearGame, geom_x: BregmanGeometry, geom_y: BregmanGeometry):
        self.game = game
        self.geom_x = geom_x
        self.geom_y = geom_y

    def reset(self, x: np.ndarray, y: np.ndarray):
        """在第一步之前调用"""

    @abstractmethod
    def step(self, x: np.ndarray, y: np.ndarray, eta: float, eta_prev: float) -> Tuple[np.ndarray, np.ndarray]:
        pass

    def _mirror(self, x, y, gx, gy, eta):
        return md_step(self.geom_x, x, gx, eta), md_step(self.geom_y, y, gy, eta)


class _GradientRule(_UpdateRule):
    """GDA / MWU"""

    def step(self, x, y, eta, eta_prev):
        gx, gy = self.game.operator(x, y)
        return self._mirror(x, y, gx, gy, eta)


class _OptimisticRule(_UpdateRule):
    """OGDA / OMWU，第一步的提示梯度取当前梯度"""

    def reset(self, x, y):
        self.prev = None

    def step(self, x, y, eta, eta_prev):
        gx, gy = self.game.operator(x, y)
        px, py = self.prev if self.prev is not None else (gx, gy)
        self.prev = (gx, gy)
        return (omd_step(self.geom_x, x, gx, px, eta, eta_prev),
                omd_step(self.geom_y, y, gy, py, eta, eta_prev))


class _ExtragradientRule(_UpdateRule):
    """两次投影的外梯度法"""

    def step(self, x, y, eta, eta_prev):
        gx, gy = self.game.operator(x, y)
        hx, hy = self._mirror(x, y, gx, gy, eta)
        gx, gy = self.game.operator(hx, hy)
        return self._mirror(x, y, gx, gy, eta)


class _PastExtragradientRule(_UpdateRule):
    """过去外梯度法：半步使用上一次半步点处的梯度，每步只调用一次算子"""

    def reset(self, x, y):
        self.half_grad = self.game.operator(x, y)

    def step(self, x, y, eta, eta_prev):
        hx, hy = self._mirror(x, y, *self.half_grad, eta)
        self.half_grad = self.game.operator(hx, hy)
        return self._mirror(x, y, *self.half_grad, eta)


class _ReflectedGradientRule(_UpdateRule):
    """反射梯度法：在 2z_k - z_{k-1} 处求梯度"""

    def reset(self, x, y):
        self.prev = (x.copy(), y.copy())

    def step(self, x, y, eta, eta_prev):
        px, py = self.prev
        self.prev = (x.copy(), y.copy())
        gx, gy = self.game.operator(2.0 * x - px, 2.0 * y - py)
        return self._mirror(x, y, gx, gy, eta)


class _SinglyOptimisticRule(_UpdateRule):
    """x 方乐观下降，y 方普通上升"""

    def reset(self, x, y):
        self.prev_gx = None

    def step(self, x, y, eta, eta_prev):
        gx, gy = self.game.operator(x, y)
        prev_gx = self.prev_gx if self.prev_gx is not None else gx
        self.prev_gx = gx
        return (omd_step(self.geom_x, x, gx, prev_gx, eta, eta_prev),
                md_step(self.geom_y, y, gy, eta))


_RULES = {
    GameAlgorithm.GDA: _GradientRule,
    GameAlgorithm.MWU: _GradientRule,
    GameAlgorithm.OGDA: _OptimisticRule,
    GameAlgorithm.OMWU: _OptimisticRule,
    GameAlgorithm.EG: _ExtragradientRule,
    GameAlgorithm.PEG: _PastExtragradientRule,
    GameAlgorithm.RG: _ReflectedGradientRule,
    GameAlgorithm.SINGLY_OPTIMISTIC: _SinglyOptimisticRule,
}


def _player_geometry(algo: GameAlgorithm, domain: Domain) -> BregmanGeometry:
    if algo in (GameAlgorithm.MWU, GameAlgorithm.OMWU):
        if domain.kind != DomainKind.SIMPLEX:
            raise ValidationError(f"{algo.value} 需要单纯形定义域")
        return BregmanGeometry(GeometryKind.NEGATIVE_ENTROPY, domain)
    return BregmanGeometry(GeometryKind.EUCLIDEAN, domain)


def _diagnostics(game: BilinearGame, x: np.ndarray, y: np.ndarray) -> Dict[str, float]:
    gx, gy = game.operator(x, y)
    return {
        'norm': float(np.sqrt(x @ x + y @ y)),
        'objective': game.objective(x, y),
        'operator_norm': float(np.sqrt(gx @ gx + gy @ gy)),
    }


def solve_game(game: BilinearGame, algo: Union[GameAlgorithm, str], schedule: StepSchedule,
               init: Tuple[np.ndarray, np.ndarray], iters: int, stride: int = 1) -> IterateTrace:
    """
    运行博弈动力学

    Args:
        game: 双线性博弈
        algo: 算法名称或枚举
        schedule: 步长序列
        init: 初始点 (x0, y0)
        iters: 迭代次数 K
        stride: 记录间隔

    Returns:
        在 k = 0, stride, 2*stride, ... 以及 k = K 处记录的轨迹
    """
    algo = GameAlgorithm.parse(algo)
    if int(iters) < 1:
        raise ValidationError(f"迭代次数至少为 1，当前为 {iters}")
    if int(stride) < 1:
        raise ValidationError(f"记录间隔至少为 1，当前为 {stride}")
    iters, stride = int(iters), int(stride)

    x = np.atleast_1d(np.asarray(init[0], dtype=float)).copy()
    y = np.atleast_1d(np.asarray(init[1], dtype=float)).copy()
    if x.shape != (game.n_x,) or y.shape != (game.n_y,):
        raise ValidationError(f"初始点维度与收益矩阵 {game.payoff_matrix.shape} 不匹配")
    if not game.x_domain.contains(x, DOMAIN_TOL) or not game.y_domain.contains(y, DOMAIN_TOL):
        raise ValidationError("初始点不在定义域内")

    rule = _RULES[algo](game, _player_geometry(algo, game.x_domain), _player_geometry(algo, game.y_domain))
    rule.reset(x, y)

    trace = IterateTrace(recorded_every=stride, algorithm=algo.value)
    trace.record(0, x, y, _diagnostics(game, x, y))

    logger.info(f"开始求解博弈，算法 {algo.value}，迭代 {iters} 次")
    for k in range(iters):
        eta = schedule.at(k)
        eta_prev = schedule.at(k - 1) if k > 0 else eta
        x, y = rule.step(x, y, eta, eta_prev)
        if (k + 1) % stride == 0 or k + 1 == iters:
            trace.record(k + 1, x, y, _diagnostics(game, x, y))

    logger.info(f"博弈求解完成，最终范数 {trace.diagnostics[-1]['norm']:.6g}")
    return trace


def running_average(series: np.ndarray) -> np.ndarray:
    """沿第一个轴的累计均值，第 k 个元素为前 k+1 个元素的均值"""
    arr = np.asarray(series, dtype=float)
    if arr.shape[0] == 0:
        raise ValidationError("序列不能为空")
    counts = np.arange(1, arr.shape[0] + 1, dtype=float).reshape((-1,) + (1,) * (arr.ndim - 1))
    return np.cumsum(arr, axis=0) / counts


def average_trace(trace: IterateTrace) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    轨迹的滑动平均迭代点

    只接受间隔为 1 的轨迹，抽样轨迹的平均有偏。
    """
    if len(trace) == 0:
        raise ValidationError("轨迹为空")
    if trace.recorded_every != 1:
        raise ValidationError(f"平均迭代点需要记录间隔为 1，当前为 {trace.recorded_every}")
    xs = running_average(trace.xs())
    ys = running_average(trace.ys())
    return [(xs[i], ys[i]) for i in range(len(xs))]
