"""
Bregman 几何模块
提供镜像映射、Bregman 散度、原型预解式与（乐观）镜像下降步
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.special import kl_div, logsumexp, softmax

from config.settings import DOMAIN_TOL
from utils.exceptions import SingularityError, ValidationError

logger = logging.getLogger(__name__)


class GeometryKind(Enum):
    """镜像映射类型"""
    EUCLIDEAN = "euclidean"
    NEGATIVE_ENTROPY = "negative_entropy"


class DomainKind(Enum):
    """定义域类型"""
    FREE = "free"
    SIMPLEX = "simplex"
    NONNEGATIVE_ORTHANT = "orthant"
    BOX = "box"
    POLYTOPE = "polytope"


def project_simplex(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    基于排序的概率单纯形欧氏投影，沿指定轴对每一行独立投影

    Args:
        z: 任意形状的实数数组
        axis: 单纯形所在的轴

    Returns:
        与 z 同形状、每行非负且和为 1 的数组
    """
    z = np.asarray(z, dtype=float)
    moved = np.moveaxis(z, axis, -1)
    flat = moved.reshape(-1, moved.shape[-1])

    u = np.sort(flat, axis=1)[:, ::-1]
    cssv = np.cumsum(u, axis=1) - 1.0
    ind = np.arange(1, flat.shape[1] + 1)
    rho = np.count_nonzero(u - cssv / ind > 0, axis=1)
    theta = cssv[np.arange(flat.shape[0]), rho - 1] / rho

    projected = np.maximum(flat - theta[:, np.newaxis], 0.0)
    return np.moveaxis(projected.reshape(moved.shape), -1, axis)


def log_mirror_step(log_x: np.ndarray, step: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    对数空间中的负熵单纯形步：log x' = log x - step - logsumexp(log x - step)

    logsumexp 内部先减去最大值，较大的 step 不会溢出。
    """
    shifted = np.asarray(log_x, dtype=float) - np.asarray(step, dtype=float)
    return shifted - logsumexp(shifted, axis=axis, keepdims=True)


def optimistic_step(grad_cur: np.ndarray, grad_prev: np.ndarray,
                    eta_cur: float, eta_prev: float) -> np.ndarray:
    """乐观有效步长: eta_cur * g_k + eta_prev * (g_k - g_{k-1})"""
    return eta_cur * grad_cur + eta_prev * (grad_cur - grad_prev)


@dataclass(frozen=True)
class Domain:
    """几何定义域"""
    kind: DomainKind = DomainKind.FREE
    lo: Optional[float] = None
    hi: Optional[float] = None
    projector: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.kind == DomainKind.BOX:
            if self.lo is None or self.hi is None or not self.lo < self.hi:
                raise ValidationError(f"盒约束需要 lo < hi，当前 lo={self.lo}, hi={self.hi}")
        if self.kind == DomainKind.POLYTOPE and self.projector is None:
            raise ValidationError("多面体定义域需要提供投影函数")

    @classmethod
    def free(cls) -> 'Domain':
        return cls(DomainKind.FREE)

    @classmethod
    def simplex(cls) -> 'Domain':
        return cls(DomainKind.SIMPLEX)

    @classmethod
    def orthant(cls) -> 'Domain':
        return cls(DomainKind.NONNEGATIVE_ORTHANT)

    @classmethod
    def box(cls, lo: float, hi: float) -> 'Domain':
        return cls(DomainKind.BOX, lo=float(lo), hi=float(hi))

    @classmethod
    def polytope(cls, projector: Callable[[np.ndarray], np.ndarray]) -> 'Domain':
        return cls(DomainKind.POLYTOPE, projector=projector)

    def contains(self, u: np.ndarray, tol: float = DOMAIN_TOL) -> bool:
        """判断 u 是否属于定义域（单纯形按最后一个轴逐行判断）"""
        u = np.asarray(u, dtype=float)
        if not np.all(np.isfinite(u)):
            return False
        if self.kind == DomainKind.SIMPLEX:
            return bool(np.all(u >= -tol) and np.all(np.abs(u.sum(axis=-1) - 1.0) <= tol))
        if self.kind == DomainKind.NONNEGATIVE_ORTHANT:
            return bool(np.all(u >= -tol))
        if self.kind == DomainKind.BOX:
            return bool(np.all(u >= self.lo - tol) and np.all(u <= self.hi + tol))
        # 自由空间与多面体（成员判定交给投影函数）
        return True

    def project(self, z: np.ndarray) -> np.ndarray:
        """欧氏投影"""
        z = np.asarray(z, dtype=float)
        if self.kind == DomainKind.FREE:
            return z.copy()
        if self.kind == DomainKind.SIMPLEX:
            return project_simplex(z)
        if self.kind == DomainKind.NONNEGATIVE_ORTHANT:
            return np.maximum(z, 0.0)
        if self.kind == DomainKind.BOX:
            return np.clip(z, self.lo, self.hi)
        return np.asarray(self.projector(z), dtype=float)


@dataclass(frozen=True)
class BregmanGeometry:
    """
    Bregman 几何：镜像映射 Ω、梯度 ∇Ω、散度 D_Ω 与原型预解式

    负熵取 Ω(u) = Σ u log u - u，其梯度为 log u；在单纯形上与 Σ u log u 只差常数。
    """
    kind: GeometryKind = GeometryKind.EUCLIDEAN
    domain: Domain = field(default_factory=Domain.free)

    def __post_init__(self):
        if self.kind == GeometryKind.NEGATIVE_ENTROPY and self.domain.kind not in (
                DomainKind.SIMPLEX, DomainKind.NONNEGATIVE_ORTHANT):
            raise ValidationError(f"负熵几何只支持单纯形或非负象限，当前为 {self.domain.kind.value}")

    @classmethod
    def euclidean(cls, domain: Optional[Domain] = None) -> 'BregmanGeometry':
        return cls(GeometryKind.EUCLIDEAN, domain or Domain.free())

    @classmethod
    def entropy_simplex(cls) -> 'BregmanGeometry':
        return cls(GeometryKind.NEGATIVE_ENTROPY, Domain.simplex())

    @classmethod
    def entropy_orthant(cls) -> 'BregmanGeometry':
        return cls(GeometryKind.NEGATIVE_ENTROPY, Domain.orthant())

    def mirror_map(self, u: np.ndarray) -> float:
        """Ω(u)"""
        u = np.asarray(u, dtype=float)
        if self.kind == GeometryKind.EUCLIDEAN:
            return 0.5 * float(np.sum(u * u))
        return float(np.sum(kl_div(u, 1.0) - 1.0))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """∇Ω(u)，负熵在零分量处取 -inf"""
        u = np.asarray(u, dtype=float)
        if self.kind == GeometryKind.EUCLIDEAN:
            return u.copy()
        with np.errstate(divide='ignore'):
            return np.log(np.maximum(u, 0.0))

    def divergence(self, u: np.ndarray, v: np.ndarray) -> float:
        return bregman_divergence(self, u, v)

    def proto_resolvent(self, y: np.ndarray) -> np.ndarray:
        """
        原型预解式 (∇Ω + N_domain)^{-1}(y) = argmin_x Ω(x) - <y, x>

        Args:
            y: 对偶空间中的点

        Returns:
            定义域中的原始点
        """
        y = np.asarray(y, dtype=float)
        if self.kind == GeometryKind.EUCLIDEAN:
            return self.domain.project(y)
        if self.domain.kind == DomainKind.SIMPLEX:
            return softmax(y, axis=-1)
        return np.exp(y)

    def mirror_step(self, x: np.ndarray, step: np.ndarray) -> np.ndarray:
        """镜像步: proto_resolvent(∇Ω(x) - step)"""
        return self.proto_resolvent(self.gradient(x) - step)


def _check_eta(eta: float, name: str = 'eta') -> float:
    eta = float(eta)
    if not np.isfinite(eta) or eta <= 0:
        raise ValidationError(f"步长 {name} 必须为正数，当前为 {eta}")
    return eta


def _check_point(geom: BregmanGeometry, x: np.ndarray, grads) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not geom.domain.contains(x):
        raise ValidationError(f"输入点不在定义域 {geom.domain.kind.value} 内")
    for grad in grads:
        grad = np.asarray(grad, dtype=float)
        if grad.shape != x.shape:
            raise ValidationError(f"梯度形状 {grad.shape} 与输入点形状 {x.shape} 不一致")
        if not np.all(np.isfinite(grad)):
            raise ValidationError("梯度包含非有限值")
    return x


def bregman_divergence(geom: BregmanGeometry, u: np.ndarray, v: np.ndarray) -> float:
    """
    Bregman 散度 D_Ω(u; v) = Ω(u) - Ω(v) - <∇Ω(v), u - v>

    Args:
        geom: 几何
        u: 第一个点
        v: 参考点（负熵下必须严格为正）

    Returns:
        非负散度值
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValidationError(f"形状不一致: {u.shape} 与 {v.shape}")
    if not geom.domain.contains(u) or not geom.domain.contains(v):
        raise ValidationError(f"散度的输入不在定义域 {geom.domain.kind.value} 内")

    if geom.kind == GeometryKind.EUCLIDEAN:
        diff = u - v
        return 0.5 * float(np.sum(diff * diff))

    if np.any(v <= 0):
        raise SingularityError("负熵散度的参考点含零分量")
    return float(np.sum(kl_div(np.maximum(u, 0.0), v)))


def md_step(geom: BregmanGeometry, x: np.ndarray, grad: np.ndarray, eta: float) -> np.ndarray:
    """
    镜像下降步 argmin_{x'} <grad, x'> + D_Ω(x'; x) / eta

    欧氏自由空间为梯度步，非负象限为截断步，负熵单纯形为乘性权重更新。
    """
    eta = _check_eta(eta)
    x = _check_point(geom, x, [grad])
    return geom.mirror_step(x, eta * np.asarray(grad, dtype=float))


def omd_step(geom: BregmanGeometry, x: np.ndarray, grad_cur: np.ndarray, grad_prev: np.ndarray,
             eta_cur: float, eta_prev: float) -> np.ndarray:
    """
    乐观镜像下降步，有效梯度为 eta_cur*g_k + eta_prev*(g_k - g_{k-1})

    两个步长相等时即 "2g_k - g_{k-1}" 规则。
    """
    eta_cur = _check_eta(eta_cur, 'eta_cur')
    eta_prev = _check_eta(eta_prev, 'eta_prev')
    x = _check_point(geom, x, [grad_cur, grad_prev])
    step = optimistic_step(np.asarray(grad_cur, dtype=float), np.asarray(grad_prev, dtype=float),
                           eta_cur, eta_prev)
    return geom.mirror_step(x, step)
