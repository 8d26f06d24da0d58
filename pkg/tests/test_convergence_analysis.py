"""
性能指标与收敛判定测试
"""

import numpy as np
import pytest

from analysis_layer import (
    ConvergenceAnalysis, LicStatus, constraint_values_at, estimate_mu_star_empirical, fitted_rate,
    lic_diagnostic, penalized_reward, weighted_reward
)
from env_layer import paradoxical_cmdp, random_cmdp
from oracle_layer import solve_cmdp_lp
from solver_layer import InitMode, SolverConfig, mu_mdpi
from utils.exceptions import ValidationError


class TestRewardMetrics:

    def test_weighted_reward(self):
        assert weighted_reward(100.0, [1.5], [1.0], [10.0]) == pytest.approx(95.0)

    def test_satisfied_constraint_costs_nothing(self):
        assert weighted_reward(1.0, [0.2, 0.3], [0.5, 0.5], [7.0, 9.0]) == 1.0

    def test_penalized_reward(self):
        assert penalized_reward(1.0, [0.6], [0.5]) == pytest.approx(0.9)

    def test_negative_weights(self):
        with pytest.raises(ValidationError):
            weighted_reward(1.0, [0.6], [0.5], [-1.0])

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            weighted_reward(1.0, [0.6, 0.1], [0.5], [1.0])

    def test_sigmoid_weights(self):
        np.testing.assert_allclose(ConvergenceAnalysis.sigmoid_mu_hat([0.0]), [1.0])
        np.testing.assert_allclose(ConvergenceAnalysis.sigmoid_mu_hat([-2.0, 3.0]), np.exp([-2.0, 3.0]), rtol=1e-12)


class TestAmplitudes:

    def test_tail_amplitude(self):
        assert ConvergenceAnalysis.tail_amplitude(np.arange(10.0), 0.2) == 1.0
        assert ConvergenceAnalysis.tail_amplitude([3.0], 0.2) == 0.0

    def test_tail_fraction(self):
        with pytest.raises(ValidationError):
            ConvergenceAnalysis.tail_amplitude([1.0, 2.0], 0.0)

    def test_window_amplitudes_drop_remainder(self):
        np.testing.assert_array_equal(ConvergenceAnalysis.window_amplitudes(np.arange(11.0), 2), [4.0, 4.0])

    def test_too_many_windows(self):
        with pytest.raises(ValidationError):
            ConvergenceAnalysis.window_amplitudes([1.0, 2.0], 3)


class TestLicDiagnostic:

    def test_period_two_oscillation(self):
        gap = 0.3
        series = np.tile([0.0, gap], 100)
        verdict = lic_diagnostic(series)
        assert verdict.status == LicStatus.OSCILLATING
        assert verdict.amplitude == pytest.approx(gap)
        assert verdict.window == 20

    def test_geometric_decay_converges(self):
        verdict = lic_diagnostic(0.9 ** np.arange(500))
        assert verdict.converged
        assert verdict.limit == pytest.approx(0.9 ** 499)

    def test_stalled_away_from_zero(self):
        assert not lic_diagnostic(np.full(200, 0.5)).converged

    def test_tolerance(self):
        series = np.full(200, 5e-3)
        assert not lic_diagnostic(series).converged
        assert lic_diagnostic(series, tol=1e-2).converged

    def test_non_finite_tail(self):
        series = np.r_[np.ones(150), np.inf * np.ones(50)]
        verdict = lic_diagnostic(series)
        assert verdict.status == LicStatus.OSCILLATING
        assert verdict.amplitude == float('inf')

    def test_too_short(self):
        with pytest.raises(ValidationError):
            lic_diagnostic(np.zeros(99))

    def test_average_of_alternating_series_converges(self):
        series = np.tile([1.0, -1.0], 5000)
        assert not lic_diagnostic(series).converged
        assert ConvergenceAnalysis.aic_diagnostic(series).converged


class TestSaddleDistances:

    @pytest.fixture(scope='class')
    def baseline(self):
        cmdp = paradoxical_cmdp()
        return cmdp, mu_mdpi(cmdp, SolverConfig(iterations=300))

    def test_distance_at_start(self, baseline):
        cmdp, trace = baseline
        saddle = solve_cmdp_lp(cmdp)
        distances = ConvergenceAnalysis.distance_to_saddle(trace, saddle)
        # 均匀策略价值为 0.5，μ⁰ = 0
        assert distances[0] == pytest.approx(1.0, abs=1e-12)
        averaged = ConvergenceAnalysis.averaged_distance_to_saddle(trace, saddle)
        assert averaged[0] == distances[0]
        assert len(averaged) == len(trace)

    def test_infeasible_saddle(self, baseline):
        _, trace = baseline
        with pytest.raises(ValidationError):
            ConvergenceAnalysis.distance_to_saddle(trace, solve_cmdp_lp(paradoxical_cmdp(threshold=-0.1)))

    def test_empirical_mu_star(self, baseline):
        _, trace = baseline
        estimate = estimate_mu_star_empirical([trace, trace])
        np.testing.assert_allclose(estimate.mu, trace.final_record().mu)
        with pytest.raises(ValidationError):
            estimate_mu_star_empirical([])

    @pytest.mark.slow
    def test_empirical_mu_star_tracks_oracle(self):
        errors = []
        for seed in range(10):
            cmdp = random_cmdp(seed, n_states=5, n_actions=3, n_constraints=1)
            traces = [mu_mdpi(cmdp, SolverConfig(eta_pi=0.2, eta_mu=0.05, iterations=5000, stride=100,
                                                 init_mode=InitMode.RANDOM.value, seed=run))
                      for run in range(8)]
            estimate = estimate_mu_star_empirical(traces)
            errors.append(np.abs(estimate.mu - solve_cmdp_lp(cmdp).mu_star.mu).mean())
        assert np.mean(errors) <= 0.2

    def test_constraint_values(self, baseline):
        _, trace = baseline
        np.testing.assert_array_equal(constraint_values_at(trace, 0), [trace.records[0].values[1]])


class TestFittedRate:

    def test_rate(self):
        assert fitted_rate(0.5 ** np.arange(30)) == pytest.approx(2.0, rel=1e-9)

    @pytest.mark.parametrize('series', [np.ones(5), np.r_[np.ones(20), 0.0], np.r_[np.ones(20), np.nan]])
    def test_unusable_series(self, series):
        assert fitted_rate(series) is None
