"""
实验运行、参数扫描与博弈实验测试
"""

import json

import numpy as np
import pytest

from bench_layer import (
    ExperimentRunner, RunConfig, SweepRunner, build_summary, load_sweep_config, read_series_csv,
    run_experiment, run_game_experiment, run_sweep
)
from env_layer import EnvSpec
from solver_layer import SolverConfig
from utils.exceptions import ValidationError


def _config(tmp_path=None, **overrides) -> RunConfig:
    data = dict(
        env=EnvSpec('paradox'),
        solver='reload-mdpi',
        solver_config=SolverConfig(iterations=120),
        out_dir=str(tmp_path) if tmp_path is not None else None,
    )
    data.update(overrides)
    return RunConfig(**data)


class TestRunConfig:

    def test_round_trip(self):
        config = _config(seeds=[0, 3])
        restored = RunConfig.from_dict(json.loads(json.dumps(config.to_dict())))
        assert restored.to_dict() == config.to_dict()

    def test_from_plain_dicts(self):
        config = RunConfig.from_dict({'env': {'name': 'random', 'parameters': {'n_states': 3}},
                                      'solver': 'mu-mdpi', 'solver_config': {'iterations': 7}})
        assert config.env.parameters == {'n_states': 3}
        assert config.solver_config.iterations == 7

    @pytest.mark.parametrize('overrides', [{'solver': 'adam'}, {'seeds': []}, {'seeds': [1, 1]}, {'lic_tol': 0.0}])
    def test_validation(self, overrides):
        with pytest.raises(ValidationError):
            _config(**overrides)

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            RunConfig.from_dict({'env': {'name': 'paradox'}, 'solver': 'mu-mdpi', 'threads': 4})

    def test_missing_solver(self):
        with pytest.raises(ValidationError):
            RunConfig.from_dict({'env': {'name': 'paradox'}})

    def test_random_env_follows_seed(self):
        config = _config(env=EnvSpec('random'))
        assert config.env_for_seed(4).parameters['seed'] == 4
        pinned = _config(env=EnvSpec('random', {'seed': 9}))
        assert pinned.env_for_seed(4).parameters['seed'] == 9
        assert 'seed' not in _config().env_for_seed(4).parameters


class TestExperimentRunner:

    def test_single_iteration(self, tmp_path):
        report = run_experiment(_config(tmp_path, solver_config=SolverConfig(iterations=1)))
        result = report.results[0]
        assert result.ok
        assert len(result.trace) == 2
        assert result.lic is None
        assert result.distances is not None
        frame = read_series_csv(result.csv_path)
        assert list(frame.columns) == ['iter', 'v0', 'v1', 'mu1', 'lagrangian', 'dist_to_saddle']
        assert frame['iter'].tolist() == [0, 1]

    def test_summary(self, tmp_path):
        report = run_experiment(_config(tmp_path, seeds=[0, 1]))
        summary = report.summary.set_index('metric')
        assert summary.loc['v0', 'n'] == 2
        assert summary.loc['seeds_failed', 'mean'] == 0.0
        assert summary.loc['mu_hat_star1_oracle', 'mean'] == pytest.approx(1.0, abs=1e-9)
        assert {'lic_converged', 'aic_converged', 'weighted_reward_raw_mu', 'weighted_reward_exp_mu',
                'penalized_reward'} <= set(summary.index)
        assert (tmp_path / 'summary.csv').exists()
        assert (tmp_path / 'reload-mdpi.svg').exists()
        assert set(report.verdicts()) == {0, 1}

    def test_outputs_are_reproducible(self, tmp_path):
        run_experiment(_config(tmp_path / 'a', seeds=[2]))
        run_experiment(_config(tmp_path / 'b', seeds=[2]))
        for name in ['reload-mdpi_seed2.csv', 'summary.csv', 'reload-mdpi.svg']:
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()

    def test_failed_seed_is_recorded(self):
        report = run_experiment(_config(env=EnvSpec('random', {'n_states': 3}), seeds=[0, -1]))
        assert [r.seed for r in report.succeeded] == [0]
        assert 'ValidationError' in report.failed[0].error
        assert report.summary.set_index('metric').loc['seeds_failed', 'mean'] == 1.0

    def test_all_seeds_failing_raises(self):
        with pytest.raises(ValidationError):
            run_experiment(_config(env=EnvSpec('random'), seeds=[-1]))

    def test_without_oracle(self):
        report = run_experiment(_config(use_oracle=False, solver='mu-mdpi'))
        result = report.results[0]
        assert result.distances is None and result.lic is None
        assert report.mu_hat_source == 'empirical'
        assert np.isnan(result.series_frame()['dist_to_saddle']).all()
        assert 'final_distance' not in set(report.summary['metric'])

    def test_oracle_cached_across_seeds(self):
        runner = ExperimentRunner(_config(seeds=[0, 1, 2]))
        runner.run()
        assert len(runner._oracle_cache) == 1

    def test_build_summary_stderr(self):
        report = run_experiment(_config(seeds=[0, 1], solver='mu-mdpi', solver_config=SolverConfig(iterations=3)))
        rebuilt = build_summary(report).set_index('metric')
        v0 = [r.final_values[0] for r in report.results]
        # 初始策略均匀且 seed 只影响随机初始化，两次运行相同
        assert v0[0] == v0[1]
        assert rebuilt.loc['v0', 'stderr'] == 0.0


class TestSweep:

    def test_grid(self, tmp_path):
        base = _config(tmp_path, solver_config=SolverConfig(iterations=5))
        grid = {'solver': ['reload-mdpi', 'mu-mdpi'], 'solver_config.eta_mu': [0.05, 0.1]}
        frame = SweepRunner(base, grid).run()
        assert len(frame) == 4
        assert (frame['error'] == '').all()
        assert (tmp_path / 'sweep.csv').exists()
        assert (tmp_path / 'run_003' / 'summary.csv').exists()

    def test_bad_combination_is_recorded(self):
        base = _config(solver_config=SolverConfig(iterations=5))
        frame = SweepRunner(base, {'solver_config.eta_pi': [0.2, -1.0]}).run()
        assert frame.loc[0, 'error'] == ''
        assert 'ValidationError' in frame.loc[1, 'error']

    def test_env_parameters(self):
        base = _config(env=EnvSpec('random', {'n_states': 3}), solver_config=SolverConfig(iterations=5))
        frame = SweepRunner(base, {'env.n_states': [2, 3]}).run()
        assert frame['seeds_ok'].tolist() == [1, 1]

    def test_run_sweep_validation(self):
        with pytest.raises(ValidationError):
            run_sweep({'base': _config().to_dict()})
        with pytest.raises(ValidationError):
            run_sweep({'base': _config().to_dict(), 'grid': {'solver': []}})

    def test_load_config(self, tmp_path):
        path = tmp_path / 'sweep.json'
        path.write_text(json.dumps({'base': _config().to_dict(), 'grid': {'seeds': [[0], [1]]}}), encoding='utf-8')
        frame = run_sweep(load_sweep_config(str(path)))
        assert frame['seeds'].tolist() == ['[0]', '[1]']
        with pytest.raises(ValidationError):
            load_sweep_config(str(tmp_path / 'missing.json'))


class TestGameExperiment:

    def test_outputs(self, tmp_path):
        trace, frame = run_game_experiment('ogda', 0.1, 100, out_dir=str(tmp_path))
        assert len(trace) == 101
        assert frame['dist_to_saddle'].iloc[0] == pytest.approx(np.sqrt(2.0))
        assert (tmp_path / 'ogda.csv').exists()
        assert (tmp_path / 'ogda.svg').exists()

    def test_multiplicative_weights_use_simplex_game(self):
        _, frame = run_game_experiment('omwu', 0.1, 10)
        assert {'x0', 'x1', 'y0', 'y1'} <= set(frame.columns)
        assert frame['dist_to_saddle'].iloc[0] == pytest.approx(np.sqrt(0.16 + 0.16 + 0.09 + 0.09))

    def test_unknown_algorithm(self):
        with pytest.raises(ValidationError):
            run_game_experiment('adam', 0.1, 10)
