"""
命令行测试
"""

import json

import pytest

from ui_layer import build_parser, main, parse_seeds, run_config_from_args
from ui_layer import cli
from config.settings import EXIT_OK, EXIT_ORACLE_ERROR, EXIT_SOLVER_ERROR, EXIT_VALIDATION_ERROR, LIC_TOL_CATCH
from utils.exceptions import NumericalError, OracleError, ValidationError


class TestParsing:

    def test_seeds(self):
        assert parse_seeds('0,1, 2') == [0, 1, 2]
        with pytest.raises(ValidationError):
            parse_seeds('a,b')
        with pytest.raises(ValidationError):
            parse_seeds(',')

    def test_cmdp_arguments(self):
        args = build_parser().parse_args(['cmdp', '--env', 'random', '--solver', 'peg-mdpi', '--eta-pi', '0.5',
                                          '--seeds', '1,2', '--geometry', 'euclidean', '--no-optimism'])
        config = run_config_from_args(args)
        assert config.seeds == [1, 2]
        assert config.solver_config.eta_pi == 0.5
        assert config.solver_config.policy_geometry == 'euclidean'
        assert not config.solver_config.optimism
        assert not config.use_oracle

    def test_catch_tolerance(self):
        args = build_parser().parse_args(['cmdp', '--env', 'catch', '--solver', 'reload-mdpi'])
        assert run_config_from_args(args).lic_tol == LIC_TOL_CATCH

    def test_invalid_choice(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['game', '--alg', 'adam'])


class TestCommands:

    def test_game(self, tmp_path, capsys):
        assert main(['game', '--alg', 'eg', '--iters', '50', '--out', str(tmp_path)]) == EXIT_OK
        assert (tmp_path / 'eg.csv').exists()
        assert 'eg' in capsys.readouterr().out

    def test_cmdp(self, tmp_path):
        code = main(['cmdp', '--env', 'paradox', '--solver', 'reload-mdpi', '--iters', '20', '--oracle',
                     '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / 'reload-mdpi_seed0.csv').exists()

    def test_bad_seeds(self):
        assert main(['cmdp', '--env', 'paradox', '--solver', 'mu-mdpi', '--seeds', 'x']) == EXIT_VALIDATION_ERROR

    def test_bad_step(self):
        assert main(['game', '--alg', 'gda', '--eta', '-1', '--iters', '5']) == EXIT_VALIDATION_ERROR

    def test_sweep(self, tmp_path):
        path = tmp_path / 'sweep.json'
        base = {'env': {'name': 'paradox'}, 'solver': 'mu-mdpi', 'solver_config': {'iterations': 3}}
        path.write_text(json.dumps({'base': base, 'grid': {'solver_config.eta_mu': [0.05, 0.1]}}), encoding='utf-8')
        assert main(['sweep', '--config', str(path)]) == EXIT_OK

    def test_missing_sweep_file(self, tmp_path):
        assert main(['sweep', '--config', str(tmp_path / 'none.json')]) == EXIT_VALIDATION_ERROR

    @pytest.mark.parametrize('error, code', [(NumericalError('singular'), EXIT_SOLVER_ERROR),
                                             (OracleError('cycling'), EXIT_ORACLE_ERROR)])
    def test_error_codes(self, monkeypatch, error, code):
        def fail(args):
            raise error
        monkeypatch.setitem(cli.COMMANDS, 'game', fail)
        assert main(['game', '--alg', 'gda']) == code
