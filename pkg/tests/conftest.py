"""
测试公共夹具
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cmdp_layer import Cmdp  # noqa: E402
from env_layer import paradoxical_cmdp, random_cmdp  # noqa: E402


@pytest.fixture
def paradox() -> Cmdp:
    return paradoxical_cmdp()


@pytest.fixture
def small_random() -> Cmdp:
    return random_cmdp(seed=3, n_states=4, n_actions=3, n_constraints=2)


@pytest.fixture
def unconstrained() -> Cmdp:
    """两状态两动作、无约束"""
    kernel = np.array([
        [[0.9, 0.1], [0.2, 0.8]],
        [[0.5, 0.5], [0.0, 1.0]],
    ])
    return Cmdp(
        kernel=kernel,
        task_reward=np.array([[1.0, 0.0], [0.3, 0.6]]),
        constraint_rewards=np.zeros((0, 2, 2)),
        thresholds=[],
        gamma=0.8,
        initial_dist=np.array([0.7, 0.3]),
        name='unconstrained',
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
