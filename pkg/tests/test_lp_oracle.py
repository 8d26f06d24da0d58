"""
线性规划预言机与蛮力验证测试
"""

import json

import numpy as np
import pytest
from scipy.optimize import linprog

from cmdp_layer import Policy, flow_matrix, flow_residual, flow_rhs, lagrangian, occupancy_from_policy
from env_layer import paradoxical_cmdp, random_cmdp, with_threshold
from oracle_layer import (
    SaddleStatus, ThresholdClass, achievable_range, brute_force_verify, classify_threshold, simplex_grid,
    solve_cmdp_lp
)
from utils.exceptions import ValidationError


class TestParadoxOracle:

    def test_value_and_multiplier(self, paradox):
        saddle = solve_cmdp_lp(paradox)
        assert saddle.status == SaddleStatus.OPTIMAL
        assert saddle.primal_value == pytest.approx(0.5, abs=1e-10)
        assert saddle.mu_star.mu[0] == pytest.approx(1.0, abs=1e-10)
        assert saddle.is_certified()
        assert saddle.threshold_classes == [ThresholdClass.INTERMEDIATE]

    def test_occupancy_is_feasible(self, paradox):
        saddle = solve_cmdp_lp(paradox)
        assert flow_residual(paradox, saddle.d_star) <= 1e-10
        assert saddle.values[1] <= 0.5 + 1e-10

    def test_achievable_range(self, paradox):
        low, high = achievable_range(paradox, 0)
        assert low == pytest.approx(0.0, abs=1e-12)
        assert high == pytest.approx(1.0, abs=1e-12)

    def test_extreme_threshold(self):
        saddle = solve_cmdp_lp(paradoxical_cmdp(threshold=1.0))
        assert saddle.status == SaddleStatus.THRESHOLD_EXTREME
        assert saddle.threshold_classes == [ThresholdClass.EXTREME_HIGH]
        assert saddle.primal_value == pytest.approx(1.0, abs=1e-10)

    def test_low_threshold_class(self, paradox):
        assert classify_threshold(paradox.with_thresholds([0.001]), 0) == ThresholdClass.EXTREME_LOW

    def test_infeasible_threshold(self):
        saddle = solve_cmdp_lp(paradoxical_cmdp(threshold=-0.1))
        assert saddle.status == SaddleStatus.INFEASIBLE
        assert not saddle.is_feasible
        assert not saddle.is_certified()

    def test_json(self, paradox):
        data = json.loads(solve_cmdp_lp(paradox).to_json())
        assert data['status'] == 'optimal'
        assert len(data['d_star']) == 4

    def test_constraint_index(self, paradox):
        with pytest.raises(ValidationError):
            achievable_range(paradox, 1)


class TestRandomOracle:

    @pytest.mark.parametrize('seed', range(20))
    def test_certified(self, seed):
        cmdp = random_cmdp(seed, n_states=5, n_actions=3, n_constraints=2)
        saddle = solve_cmdp_lp(cmdp)
        assert saddle.status == SaddleStatus.OPTIMAL
        assert saddle.duality_gap <= 1e-8
        assert saddle.is_certified()
        assert np.all(saddle.mu_star.mu >= 0)

    @pytest.mark.parametrize('seed', range(20))
    def test_saddle_inequalities(self, seed):
        cmdp = random_cmdp(seed, n_states=5, n_actions=3, n_constraints=2)
        saddle = solve_cmdp_lp(cmdp)
        rng = np.random.default_rng(seed)
        at_saddle = lagrangian(cmdp, saddle.d_star, saddle.mu_star)
        for _ in range(100):
            d = occupancy_from_policy(cmdp, Policy(rng.dirichlet(np.ones(3), size=5)))
            mu = rng.exponential(2.0, size=2)
            assert lagrangian(cmdp, saddle.d_star, mu) <= at_saddle + 1e-7
            assert at_saddle <= lagrangian(cmdp, d, saddle.mu_star) + 1e-7

    @pytest.mark.parametrize('seed', range(5))
    def test_matches_reference_solver(self, seed):
        cmdp = random_cmdp(seed, n_states=6, n_actions=2, n_constraints=1)
        saddle = solve_cmdp_lp(cmdp, classify=False)
        reference = linprog(
            -cmdp.task_reward.reshape(-1),
            A_eq=flow_matrix(cmdp), b_eq=flow_rhs(cmdp),
            A_ub=cmdp.constraint_rewards.reshape(1, -1), b_ub=cmdp.thresholds,
            bounds=(0, None), method='highs',
        )
        assert saddle.primal_value == pytest.approx(-reference.fun, abs=1e-9)
        assert saddle.threshold_classes == []

    def test_unconstrained(self, unconstrained):
        saddle = solve_cmdp_lp(unconstrained)
        assert saddle.mu_star.mu.size == 0
        assert saddle.is_certified()


class TestBruteForce:

    def test_grid(self):
        grid = simplex_grid(3, 2)
        assert grid.shape == (6, 3)
        np.testing.assert_allclose(grid.sum(axis=1), 1.0)

    def test_paradox_agrees_with_oracle(self, paradox):
        estimate = brute_force_verify(paradox, 1000)
        assert estimate.primal_value == pytest.approx(0.5, abs=2e-3)
        assert estimate.mu_star.mu[0] == pytest.approx(1.0, abs=1e-3)
        assert estimate.policy is not None

    @pytest.mark.parametrize('theta', [0.2, 0.8])
    def test_other_thresholds(self, theta):
        cmdp = with_threshold(paradoxical_cmdp(), 0, theta)
        estimate = brute_force_verify(cmdp, 200)
        assert estimate.primal_value == pytest.approx(solve_cmdp_lp(cmdp).primal_value, abs=2.0 / 200)

    def test_infeasible(self):
        assert brute_force_verify(paradoxical_cmdp(threshold=-0.1), 10).status == SaddleStatus.INFEASIBLE

    def test_size_limit(self, small_random):
        with pytest.raises(ValidationError):
            brute_force_verify(small_random, 10)

    def test_resolution(self, paradox):
        with pytest.raises(ValidationError):
            brute_force_verify(paradox, 0)
