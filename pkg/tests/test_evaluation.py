"""
策略评估与拉格朗日函数测试
"""

from dataclasses import replace

import numpy as np
import pytest

from cmdp_layer import (
    Policy, bellman_residual, evaluate_all, lagrangian, lagrangian_gradients, mixed_q, mixed_reward,
    occupancy_from_policy, policy_eval, policy_from_occupancy, value_of, values
)
from utils.exceptions import ValidationError


def _random_policy(rng, n_states, n_actions):
    return Policy(rng.dirichlet(np.ones(n_actions), size=n_states))


class TestEvaluation:

    def test_bellman_residual(self, small_random, rng):
        policy = _random_policy(rng, 4, 3)
        for n in range(3):
            assert bellman_residual(small_random, policy, policy_eval(small_random, policy, n)) <= 1e-12

    def test_occupancy_is_distribution(self, small_random, rng):
        d = occupancy_from_policy(small_random, _random_policy(rng, 4, 3))
        assert d.total_mass == pytest.approx(1.0, abs=1e-12)
        assert np.all(d.d >= 0)

    def test_values_match_initial_value(self, unconstrained, rng):
        result = evaluate_all(unconstrained, _random_policy(rng, 2, 2))
        expected = (1.0 - unconstrained.gamma) * result.diagnostics['rho_value']
        assert result.values[0] == pytest.approx(expected, abs=1e-12)
        np.testing.assert_allclose(values(unconstrained, result.occupancy), result.values, atol=1e-15)

    def test_paradox_values(self, paradox):
        assert value_of(paradox, Policy.deterministic([0, 0], 2)) == pytest.approx(1.0, abs=1e-12)
        assert value_of(paradox, Policy.deterministic([1, 1], 2)) == pytest.approx(0.0, abs=1e-12)
        assert value_of(paradox, Policy.uniform(2, 2)) == pytest.approx(0.5, abs=1e-12)

    def test_policy_round_trip(self, small_random, rng):
        policy = _random_policy(rng, 4, 3)
        recovered = policy_from_occupancy(occupancy_from_policy(small_random, policy))
        np.testing.assert_allclose(recovered.probs, policy.probs, atol=1e-10)

    def test_unvisited_state_gets_uniform_policy(self):
        d = np.array([[0.4, 0.6], [0.0, 0.0]])
        np.testing.assert_allclose(policy_from_occupancy(d).probs, [[0.4, 0.6], [0.5, 0.5]])

    def test_reward_index_range(self, paradox):
        with pytest.raises(ValidationError):
            policy_eval(paradox, Policy.uniform(2, 2), 2)

    def test_policy_shape(self, paradox):
        with pytest.raises(ValidationError):
            evaluate_all(paradox, Policy.uniform(3, 2))


class TestLagrangian:

    def test_mixed_reward(self, paradox):
        np.testing.assert_allclose(mixed_reward(paradox, [1.0]), 0.0)
        np.testing.assert_allclose(mixed_reward(paradox, [0.0]), -paradox.task_reward)

    def test_mixed_q(self):
        q0 = np.array([[1.0, 2.0]])
        qs = np.array([[[0.5, 0.0]], [[0.0, 1.0]]])
        np.testing.assert_allclose(mixed_q(q0, qs, [2.0, 3.0]), [[0.0, 1.0]])
        np.testing.assert_allclose(mixed_q(q0, [], []), -q0)

    def test_mixing_commutes_with_evaluation(self, small_random, rng):
        for _ in range(10):
            policy = _random_policy(rng, 4, 3)
            mu = rng.exponential(1.0, size=2)
            evaluation = evaluate_all(small_random, policy)
            expected = mixed_q(evaluation.qvalues(0).q, [evaluation.qvalues(n).q for n in (1, 2)], mu)
            mixed_cmdp = replace(small_random, task_reward=mixed_reward(small_random, mu))
            np.testing.assert_allclose(policy_eval(mixed_cmdp, policy, 0).q, expected, atol=1e-9)

    def test_mixed_q_count_mismatch(self):
        with pytest.raises(ValidationError):
            mixed_q(np.zeros((1, 2)), np.zeros((2, 1, 2)), [1.0])

    def test_paradox_saddle_value(self, paradox):
        d = occupancy_from_policy(paradox, Policy.uniform(2, 2))
        assert lagrangian(paradox, d, [1.0]) == pytest.approx(-0.5, abs=1e-12)

    def test_gradients_match_finite_differences(self, small_random, rng):
        d = occupancy_from_policy(small_random, _random_policy(rng, 4, 3)).d
        mu = rng.random(2)
        grad_d, grad_mu = lagrangian_gradients(small_random, d, mu)
        eps = 1e-6
        for idx in [(0, 0), (2, 1), (3, 2)]:
            bumped = d.copy()
            bumped[idx] += eps
            diff = (lagrangian(small_random, bumped, mu) - lagrangian(small_random, d, mu)) / eps
            assert diff == pytest.approx(grad_d[idx], abs=1e-6)
        for n in range(2):
            bumped = mu.copy()
            bumped[n] += eps
            diff = (lagrangian(small_random, d, bumped) - lagrangian(small_random, d, mu)) / eps
            assert diff == pytest.approx(grad_mu[n], abs=1e-6)

    def test_multiplier_count(self, small_random):
        with pytest.raises(ValidationError):
            mixed_reward(small_random, [1.0])
