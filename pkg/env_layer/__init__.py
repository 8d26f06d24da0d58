"""
环境层模块
基准 CMDP 构造器、环境注册表与可复现随机数
"""

from .prng import make_rng, sample_dirichlet
from .benchmark_envs import (
    paradoxical_cmdp, constrained_catch, random_cmdp,
    with_threshold, extreme_threshold_variants,
    catch_state_index, catch_mirror_permutation
)
from .env_factory import EnvSpec, EnvFactory, get_env_factory, make_env, list_envs

__all__ = [
    'make_rng', 'sample_dirichlet',
    'paradoxical_cmdp', 'constrained_catch', 'random_cmdp',
    'with_threshold', 'extreme_threshold_variants',
    'catch_state_index', 'catch_mirror_permutation',
    'EnvSpec', 'EnvFactory', 'get_env_factory', 'make_env', 'list_envs'
]
