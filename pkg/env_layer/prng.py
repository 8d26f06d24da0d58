"""
随机数模块
可复现的 64 位伪随机数生成器与平坦 Dirichlet 采样
"""

from typing import Tuple, Union

import numpy as np

from utils.exceptions import ValidationError

MAX_SEED = 2 ** 64


def make_rng(seed: int) -> np.random.Generator:
    """
    以 PCG64（128 位状态的置换同余生成器，64 位输出）创建生成器

    同一种子在任何平台上产生相同序列。
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"种子必须是整数，当前为 {seed!r}")
    if not 0 <= int(seed) < MAX_SEED:
        raise ValidationError(f"种子必须在 [0, 2^64) 内，当前为 {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_dirichlet(rng: np.random.Generator, size: Union[int, Tuple[int, ...]], k: int) -> np.ndarray:
    """
    平坦 Dirichlet(1, ..., 1) 采样：对均匀数取 -log(1 - u) 得到指数变量后归一化

    Args:
        rng: 随机数生成器
        size: 批量形状
        k: 分布维数

    Returns:
        形状 size + (k,) 的概率向量
    """
    if k < 1:
        raise ValidationError(f"Dirichlet 维数必须为正，当前为 {k}")
    size = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
    exponentials = -np.log1p(-rng.random(size + (k,)))
    total = exponentials.sum(axis=-1, keepdims=True)
    # 全零行（概率为零的事件）退化为均匀分布
    exponentials = np.where(total > 0, exponentials, 1.0)
    return exponentials / exponentials.sum(axis=-1, keepdims=True)
