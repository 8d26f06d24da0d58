"""
命令行界面模块
reload game / reload cmdp / reload sweep
"""

import argparse
import logging
import sys
from typing import List, Optional

from bench_layer import RunConfig, load_sweep_config, run_experiment, run_game_experiment, run_sweep
from config.settings import (
    APP_NAME, APP_VERSION, DEFAULT_ETA_MU, DEFAULT_ETA_PI, DEFAULT_GAME_ETA,
    DEFAULT_GAME_ITERATIONS, DEFAULT_ITERATIONS, DEFAULT_STRIDE, ENV_NAMES, EXIT_OK,
    EXIT_ORACLE_ERROR, EXIT_SOLVER_ERROR, EXIT_VALIDATION_ERROR, GAME_ALGORITHMS,
    LIC_TOL_CATCH, LIC_TOL_TOY, LOG_FILE, LOG_LEVEL, SOLVER_NAMES
)
from env_layer import EnvSpec
from solver_layer import InitMode, PolicyGeometry, SolverConfig
from utils import setup_logger
from utils.exceptions import OracleError, SolverError, ValidationError

logger = logging.getLogger(__name__)


def parse_seeds(text: str) -> List[int]:
    """'0,1,2' -> [0, 1, 2]"""
    try:
        seeds = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ValidationError(f"无法解析种子列表: {text}")
    if not seeds:
        raise ValidationError("种子列表不能为空")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='reload', description=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument('--log-level', default=LOG_LEVEL, help='日志级别')
    parser.add_argument('--log-file', default=None, help='日志文件路径')
    parser.add_argument('--save-log', action='store_true', help=f'未指定 --log-file 时写入 {LOG_FILE}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    game = subparsers.add_parser('game', help='双线性博弈动力学')
    game.add_argument('--alg', choices=GAME_ALGORITHMS, required=True, help='算法')
    game.add_argument('--eta', type=float, default=DEFAULT_GAME_ETA, help='常数步长')
    game.add_argument('--iters', type=int, default=DEFAULT_GAME_ITERATIONS, help='迭代次数')
    game.add_argument('--stride', type=int, default=DEFAULT_STRIDE, help='记录间隔')
    game.add_argument('--strong-monotonicity', type=float, default=0.0, help='xy 博弈的强单调系数 m')
    game.add_argument('--out', default=None, help='输出目录')

    cmdp = subparsers.add_parser('cmdp', help='约束 MDP 求解实验')
    cmdp.add_argument('--env', choices=ENV_NAMES, required=True, help='环境')
    cmdp.add_argument('--solver', choices=SOLVER_NAMES, required=True, help='求解器')
    cmdp.add_argument('--eta-pi', type=float, default=DEFAULT_ETA_PI, help='策略温度')
    cmdp.add_argument('--eta-mu', type=float, default=DEFAULT_ETA_MU, help='乘子步长')
    cmdp.add_argument('--eta-occupancy', type=float, default=None, help='占用测度步长，默认 0.4 / L̂')
    cmdp.add_argument('--iters', type=int, default=DEFAULT_ITERATIONS, help='迭代次数')
    cmdp.add_argument('--stride', type=int, default=DEFAULT_STRIDE, help='记录间隔')
    cmdp.add_argument('--seeds', default='0', help='逗号分隔的种子列表')
    cmdp.add_argument('--init', choices=[m.value for m in InitMode], default=InitMode.UNIFORM.value,
                      help='初始策略')
    cmdp.add_argument('--geometry', choices=[g.value for g in PolicyGeometry],
                      default=PolicyGeometry.ENTROPY.value, help='PEG-MDPI 的策略几何')
    cmdp.add_argument('--no-optimism', action='store_true', help='关闭乐观项')
    cmdp.add_argument('--oracle', action='store_true', help='调用线性规划预言机')
    cmdp.add_argument('--lic-tol', type=float, default=None, help='收敛判定容差')
    cmdp.add_argument('--out', default=None, help='输出目录')

    sweep = subparsers.add_parser('sweep', help='参数网格扫描')
    sweep.add_argument('--config', required=True, help='JSON 配置文件')
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    solver_config = SolverConfig(
        eta_pi=args.eta_pi,
        eta_mu=args.eta_mu,
        iterations=args.iters,
        stride=args.stride,
        optimism=not args.no_optimism,
        init_mode=args.init,
        policy_geometry=args.geometry,
        eta_occupancy=args.eta_occupancy,
    )
    lic_tol = args.lic_tol
    if lic_tol is None:
        lic_tol = LIC_TOL_CATCH if args.env == 'catch' else LIC_TOL_TOY
    return RunConfig(
        env=EnvSpec(args.env),
        solver=args.solver,
        solver_config=solver_config,
        use_oracle=args.oracle,
        out_dir=args.out,
        seeds=parse_seeds(args.seeds),
        lic_tol=lic_tol,
    )


def _command_game(args: argparse.Namespace):
    _, frame = run_game_experiment(args.alg, args.eta, args.iters, out_dir=args.out,
                                   strong_monotonicity=args.strong_monotonicity, stride=args.stride)
    last = frame.iloc[-1]
    print(f"{args.alg}: 迭代 {int(last['iter'])}，到鞍点距离 {last['dist_to_saddle']:.6g}")


def _command_cmdp(args: argparse.Namespace):
    report = run_experiment(run_config_from_args(args))
    print(report.summary.to_string(index=False))
    for seed, verdict in report.verdicts().items():
        print(f"seed {seed}: {verdict if verdict is not None else '-'}")
    for failed in report.failed:
        print(f"seed {failed.seed} 失败: {failed.error}")


def _command_sweep(args: argparse.Namespace):
    frame = run_sweep(load_sweep_config(args.config))
    print(frame.to_string(index=False))


COMMANDS = {
    'game': _command_game,
    'cmdp': _command_cmdp,
    'sweep': _command_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    命令行入口

    Returns:
        退出码：0 成功，2 参数错误，3 求解器错误，4 预言机错误
    """
    args = build_parser().parse_args(argv)
    setup_logger(args.log_level, args.log_file or (LOG_FILE if args.save_log else None))
    try:
        COMMANDS[args.command](args)
    except OracleError as e:
        logger.error(f"预言机错误: {e}")
        return EXIT_ORACLE_ERROR
    except SolverError as e:
        logger.error(f"求解器错误: {e}")
        return EXIT_SOLVER_ERROR
    except ValidationError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_VALIDATION_ERROR
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
