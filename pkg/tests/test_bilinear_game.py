"""
双线性博弈动力学测试
"""

import numpy as np
import pytest

from game_layer import (
    BilinearGame, GameAlgorithm, StepSchedule, average_trace, running_average, solve_game, solve_xy_game
)
from utils.exceptions import ValidationError


class TestXyGame:

    @pytest.mark.parametrize('eta', [0.01, 0.1, 0.5])
    def test_gda_distance_grows_geometrically(self, eta):
        trace = solve_xy_game('gda', eta, 100)
        squared = trace.norms() ** 2
        ratios = squared[1:] / squared[:-1]
        np.testing.assert_allclose(ratios, 1.0 + eta ** 2, rtol=1e-12)

    def test_gda_matches_explicit_recursion(self):
        eta = 0.1
        trace = solve_xy_game('gda', eta, 50)
        x, y = 1.0, 1.0
        for k in range(1, 51):
            x, y = x - eta * y, y + eta * x
            assert trace.xs()[k, 0] == pytest.approx(x, abs=1e-14)
            assert trace.ys()[k, 0] == pytest.approx(y, abs=1e-14)

    def test_ogda_first_step_equals_gda(self):
        ogda = solve_xy_game('ogda', 0.1, 1)
        gda = solve_xy_game('gda', 0.1, 1)
        np.testing.assert_array_equal(ogda.xs()[1], gda.xs()[1])
        np.testing.assert_array_equal(ogda.ys()[1], gda.ys()[1])

    def test_ogda_converges_in_2000_steps(self):
        assert solve_xy_game('ogda', 0.1, 2000).norms()[-1] <= 1e-3

    @pytest.mark.parametrize('algo', ['ogda', 'eg', 'peg', 'rg'])
    def test_optimistic_family_converges(self, algo):
        assert solve_xy_game(algo, 0.1, 10000).norms()[-1] <= 1e-3

    def test_gda_diverges(self):
        norms = solve_xy_game('gda', 0.1, 10000).norms()
        assert norms[-1] >= np.sqrt(2.0)
        assert norms[-1000:].min() >= norms[0]

    def test_singly_optimistic_does_not_converge(self):
        norms = solve_xy_game('singly', 0.1, 10000).norms()
        assert norms[-1000:].min() >= 0.1

    def test_ogda_average_shrinks(self):
        averages = average_trace(solve_xy_game('ogda', 0.1, 2000))
        assert len(averages) == 2001
        np.testing.assert_array_equal(averages[0][0], [1.0])
        assert np.linalg.norm(np.concatenate(averages[-1])) < 0.1

    def test_stride(self):
        trace = solve_xy_game('ogda', 0.1, 10, stride=3)
        assert trace.iterations == [0, 3, 6, 9, 10]

    def test_frame_columns(self):
        frame = solve_xy_game('eg', 0.1, 5).to_frame()
        assert list(frame.columns[:3]) == ['iter', 'x', 'y']
        assert {'norm', 'objective', 'operator_norm'} <= set(frame.columns)
        assert len(frame) == 6


class TestSimplexGames:

    def test_omwu_approaches_uniform_equilibrium(self):
        game = BilinearGame.matching_pennies()
        init = (np.array([0.9, 0.1]), np.array([0.2, 0.8]))
        omwu = solve_game(game, 'omwu', StepSchedule.constant(0.1), init, 10000)
        mwu = solve_game(game, 'mwu', StepSchedule.constant(0.1), init, 10000)

        def distance(trace):
            return np.linalg.norm(np.hstack([trace.xs()[-1], trace.ys()[-1]]) - 0.5)

        start = np.linalg.norm(np.hstack(init) - 0.5)
        assert distance(omwu) < 0.5 * start
        assert distance(mwu) > distance(omwu)
        assert np.allclose(omwu.xs().sum(axis=1), 1.0)

    def test_mwu_requires_simplex(self):
        with pytest.raises(ValidationError):
            solve_xy_game('mwu', 0.1, 10)


class TestValidation:

    def test_unknown_algorithm(self):
        with pytest.raises(ValidationError):
            GameAlgorithm.parse('adam')

    def test_iterations(self):
        with pytest.raises(ValidationError):
            solve_xy_game('gda', 0.1, 0)

    def test_negative_strong_monotonicity(self):
        with pytest.raises(ValidationError):
            BilinearGame.xy_game(-0.1)

    def test_bounded_schedule(self):
        schedule = StepSchedule.bounded([0.1, 0.2], epsilon=0.01, lipschitz=1.0)
        assert schedule.at(5) == 0.2
        with pytest.raises(ValidationError):
            StepSchedule.bounded([0.6], epsilon=0.01, lipschitz=1.0)

    def test_lipschitz_constant(self):
        assert BilinearGame.xy_game(0.5).lipschitz_constant() == pytest.approx(1.5, rel=1e-9)


class TestRunningAverage:

    def test_constant(self):
        np.testing.assert_allclose(running_average(np.full(5, 3.0)), 3.0)

    def test_alternating(self):
        np.testing.assert_allclose(running_average([1.0, -1.0, 1.0, -1.0]), [1.0, 0.0, 1.0 / 3.0, 0.0])

    def test_average_trace_requires_unit_stride(self):
        with pytest.raises(ValidationError):
            average_trace(solve_xy_game('gda', 0.1, 10, stride=2))
