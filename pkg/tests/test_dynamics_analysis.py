"""
谱半径、谱范数与收敛率拟合测试
"""

import numpy as np
import pytest

from game_layer import (
    estimate_spectral_norm, fit_linear_rate, singly_optimistic_jacobian,
    singly_optimistic_spectral_radius, skew_operator_norm, solve_xy_game
)
from utils.exceptions import ValidationError


class TestSinglyOptimisticRadius:

    def test_zero_step_is_marginal(self):
        assert singly_optimistic_spectral_radius(0.0) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize('eta', np.linspace(0.001, 1.0, 40))
    def test_exceeds_one(self, eta):
        assert singly_optimistic_spectral_radius(eta) > 1.0

    @pytest.mark.parametrize('eta', [0.05, 0.1, 0.5, 1.0])
    def test_clearly_unstable_for_moderate_steps(self, eta):
        assert singly_optimistic_spectral_radius(eta) > 1.0 + 1e-6

    @pytest.mark.parametrize('eta', [0.05, 0.3, 0.9])
    def test_matches_jacobian_eigenvalues(self, eta):
        expected = np.abs(np.linalg.eigvals(singly_optimistic_jacobian(eta))).max()
        assert singly_optimistic_spectral_radius(eta) == pytest.approx(expected, rel=1e-9)

    def test_negative_step(self):
        with pytest.raises(ValidationError):
            singly_optimistic_spectral_radius(-0.1)


class TestSpectralNorm:

    def test_matches_svd(self, rng):
        m = rng.standard_normal((5, 3))
        expected = np.linalg.svd(m, compute_uv=False)[0]
        assert estimate_spectral_norm(m) == pytest.approx(expected, rel=1e-6)

    def test_zero_matrix(self):
        assert estimate_spectral_norm(np.zeros((3, 3))) == 0.0

    def test_skew_operator(self, rng):
        c = rng.standard_normal((2, 4))
        expected = np.linalg.svd(c, compute_uv=False)[0]
        assert skew_operator_norm(c) == pytest.approx(expected, rel=1e-6)

    def test_skew_fallback(self):
        assert skew_operator_norm(np.zeros((0, 3)), fallback=1.0) == 1.0


class TestLinearRate:

    def test_geometric_series(self):
        alpha, r2 = fit_linear_rate(2.0 ** -np.arange(40, dtype=float))
        assert alpha == pytest.approx(2.0, rel=1e-9)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_growing_series_keeps_sign(self):
        alpha, _ = fit_linear_rate(2.0 ** np.arange(20, dtype=float))
        assert alpha == pytest.approx(0.5, rel=1e-9)

    def test_constant_series(self):
        alpha, _ = fit_linear_rate(np.full(20, 0.3))
        assert alpha == 1.0

    def test_strongly_monotone_ogda_is_linear(self):
        trace = solve_xy_game('ogda', 0.3, 200, strong_monotonicity=0.5)
        alpha, r2 = fit_linear_rate(trace.norms())
        assert alpha >= 1.01
        assert r2 >= 0.99

    def test_too_short(self):
        with pytest.raises(ValidationError):
            fit_linear_rate(np.ones(5))

    def test_nonpositive(self):
        with pytest.raises(ValidationError):
            fit_linear_rate(np.r_[np.ones(15), 0.0])
