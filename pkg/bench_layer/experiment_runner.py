"""
实验运行模块
多种子 CMDP 实验、参数网格扫描与双线性博弈实验
"""

import itertools
import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from analysis_layer import ConvergenceAnalysis, LicVerdict, fitted_rate
from cmdp_layer import Cmdp
from config.settings import LIC_TOL_TOY, LIC_WINDOW_FRACTION, SOLVER_NAMES
from env_layer import EnvSpec
from game_layer import BilinearGame, GameAlgorithm, IterateTrace, StepSchedule, solve_game
from oracle_layer import SaddlePoint, solve_cmdp_lp
from solver_layer import CmdpTrace, SolverConfig, get_solver_engine
from utils.exceptions import ValidationError
from .report_writer import write_csv, write_svg_chart

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.2


@dataclass
class RunConfig:
    """
    一次实验的完整配置

    Args:
        env: 环境名称与参数
        solver: 求解器注册名称
        solver_config: 求解器配置，每个种子覆盖其 seed 字段
        use_oracle: 是否调用线性规划预言机计算到鞍点的距离
        out_dir: 输出目录，None 表示不写文件
        seeds: 种子列表
        lic_tol: 收敛判定容差
    """
    env: EnvSpec
    solver: str
    solver_config: SolverConfig = field(default_factory=SolverConfig)
    use_oracle: bool = True
    out_dir: Optional[str] = None
    seeds: List[int] = field(default_factory=lambda: [0])
    lic_tol: float = LIC_TOL_TOY

    def __post_init__(self):
        if isinstance(self.env, dict):
            self.env = EnvSpec.from_dict(self.env)
        if isinstance(self.solver_config, dict):
            self.solver_config = SolverConfig.from_dict(self.solver_config)
        if self.solver not in SOLVER_NAMES:
            raise ValidationError(f"未知求解器 {self.solver}，可选: {SOLVER_NAMES}")
        self.seeds = [int(s) for s in self.seeds]
        if not self.seeds:
            raise ValidationError("种子列表不能为空")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValidationError(f"种子重复: {self.seeds}")
        if not self.lic_tol > 0:
            raise ValidationError(f"判定容差必须为正，当前为 {self.lic_tol}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'env': self.env.to_dict(),
            'solver': self.solver,
            'solver_config': self.solver_config.to_dict(),
            'use_oracle': self.use_oracle,
            'out_dir': self.out_dir,
            'seeds': list(self.seeds),
            'lic_tol': self.lic_tol,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"未知的实验参数: {sorted(unknown)}")
        if 'env' not in data or 'solver' not in data:
            raise ValidationError("实验配置需要 env 与 solver 字段")
        return cls(**data)

    def env_for_seed(self, seed: int) -> EnvSpec:
        """random 环境未显式给出 seed 时，环境种子跟随运行种子"""
        parameters = dict(self.env.parameters)
        if self.env.name == 'random' and 'seed' not in parameters:
            parameters['seed'] = seed
        return EnvSpec(self.env.name, parameters)


@dataclass(eq=False)
class SeedResult:
    """单个种子的结果，失败时 error 非空"""
    seed: int
    trace: Optional[CmdpTrace] = None
    saddle: Optional[SaddlePoint] = None
    distances: Optional[np.ndarray] = None
    averaged_distances: Optional[np.ndarray] = None
    tail_amplitude: float = float('nan')
    lic: Optional[LicVerdict] = None
    aic: Optional[LicVerdict] = None
    alpha: Optional[float] = None
    csv_path: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def final_values(self) -> np.ndarray:
        return self.trace.final_record().values

    @property
    def final_mu(self) -> np.ndarray:
        return self.trace.final_record().mu

    def series_frame(self) -> pd.DataFrame:
        """列: iter, v0..vN, mu1..muN, lagrangian, dist_to_saddle"""
        frame = self.trace.to_frame()
        n_values = self.trace.value_matrix().shape[1]
        columns = (['iter'] + [f'v{n}' for n in range(n_values)]
                   + [f'mu{n + 1}' for n in range(self.trace.n_constraints)] + ['lagrangian'])
        frame = frame[columns].copy()
        frame['dist_to_saddle'] = self.distances if self.distances is not None else np.nan
        return frame


@dataclass(eq=False)
class ConvergenceReport:
    """实验报告：逐种子结果与跨种子汇总"""
    config: RunConfig
    results: List[SeedResult]
    mu_hat_star: Optional[np.ndarray] = None
    mu_hat_source: str = ''
    summary: pd.DataFrame = field(default_factory=pd.DataFrame)
    summary_path: Optional[str] = None

    @property
    def succeeded(self) -> List[SeedResult]:
        return [r for r in self.results if r.ok]

    @property
    def failed(self) -> List[SeedResult]:
        return [r for r in self.results if not r.ok]

    def verdicts(self) -> Dict[int, Optional[str]]:
        return {r.seed: (r.lic.status.value if r.lic is not None else None) for r in self.succeeded}


class ExperimentRunner:
    """多种子实验运行器"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.engine = get_solver_engine()
        self._oracle_cache: Dict[str, SaddlePoint] = {}

    def _oracle(self, env: EnvSpec, cmdp: Cmdp) -> SaddlePoint:
        key = json.dumps(env.to_dict(), sort_keys=True)
        if key not in self._oracle_cache:
            logger.info(f"调用线性规划预言机: {cmdp.name}")
            self._oracle_cache[key] = solve_cmdp_lp(cmdp)
        return self._oracle_cache[key]

    def _run_seed(self, seed: int) -> SeedResult:
        config = self.config
        env = config.env_for_seed(seed)
        cmdp = env.build()
        saddle = self._oracle(env, cmdp) if config.use_oracle else None

        solver_config = replace(config.solver_config, seed=seed)
        mu_star = saddle.mu_star if saddle is not None and saddle.is_feasible else None
        trace = self.engine.run(config.solver, cmdp, solver_config, mu_star=mu_star)

        result = SeedResult(seed=seed, trace=trace, saddle=saddle)
        result.tail_amplitude = ConvergenceAnalysis.tail_amplitude(trace.value_matrix()[:, 0], TAIL_FRACTION)

        if saddle is not None and saddle.is_feasible:
            result.distances = ConvergenceAnalysis.distance_to_saddle(trace, saddle)
            result.averaged_distances = ConvergenceAnalysis.averaged_distance_to_saddle(trace, saddle)
            if len(trace) >= int(np.ceil(10.0 / LIC_WINDOW_FRACTION)):
                result.lic = ConvergenceAnalysis.lic_diagnostic(result.distances, tol=config.lic_tol)
                result.aic = ConvergenceAnalysis.lic_diagnostic(result.averaged_distances, tol=config.lic_tol)
                result.alpha = fitted_rate(result.distances)
        elif saddle is not None:
            logger.warning(f"{cmdp.name} 不可行，跳过距离与收敛判定")

        if config.out_dir:
            path = os.path.join(config.out_dir, f"{config.solver}_seed{seed}.csv")
            result.csv_path = write_csv(result.series_frame(), path)
        return result

    def run(self) -> ConvergenceReport:
        config = self.config
        logger.info(f"开始实验: {config.solver} @ {config.env.name}，种子 {config.seeds}")

        results: List[SeedResult] = []
        last_error: Optional[Exception] = None
        for seed in config.seeds:
            try:
                results.append(self._run_seed(seed))
            except Exception as e:
                logger.error(f"种子 {seed} 运行失败: {e}")
                results.append(SeedResult(seed=seed, error=f"{type(e).__name__}: {e}"))
                last_error = e

        report = ConvergenceReport(config=config, results=results)
        if not report.succeeded:
            raise last_error

        report.mu_hat_star, report.mu_hat_source = self._mu_hat_star(report)
        report.summary = build_summary(report)
        if config.out_dir:
            report.summary_path = write_csv(report.summary, os.path.join(config.out_dir, 'summary.csv'))
            self._write_chart(report)
        logger.info(f"实验完成: {len(report.succeeded)} 个种子成功，{len(report.failed)} 个失败")
        return report

    @staticmethod
    def _mu_hat_star(report: ConvergenceReport) -> Tuple[np.ndarray, str]:
        """有可行预言机时取 μ*，否则取各种子最终 μ 的均值"""
        saddles = [r.saddle for r in report.succeeded if r.saddle is not None and r.saddle.is_feasible]
        if saddles:
            return np.mean([s.mu_star.mu for s in saddles], axis=0), 'oracle'
        return ConvergenceAnalysis.estimate_mu_star_empirical([r.trace for r in report.succeeded]).mu, 'empirical'

    def _write_chart(self, report: ConvergenceReport):
        ok = report.succeeded
        with_distance = all(r.distances is not None for r in ok)
        series = {f'seed {r.seed}': (r.distances if with_distance else r.trace.value_matrix()[:, 0]) for r in ok}
        x = ok[0].trace.iterations()
        write_svg_chart(
            os.path.join(self.config.out_dir, f"{self.config.solver}.svg"), series, x=x,
            title=f"{self.config.solver} on {self.config.env.name}",
            ylabel='distance to saddle' if with_distance else 'v0',
            log_scale=with_distance,
        )


def build_summary(report: ConvergenceReport) -> pd.DataFrame:
    """
    跨种子汇总

    每个指标一行：均值、标准误（样本标准差 / √n）与样本数；
    收敛判定以“判为收敛的比例”计入均值。
    """
    rows = []
    for r in report.succeeded:
        values = r.final_values
        theta = r.trace.thresholds
        row: Dict[str, float] = {'v0': values[0]}
        for n in range(1, len(values)):
            row[f'v{n}'] = values[n]
        for n, mu in enumerate(r.final_mu):
            row[f'mu{n + 1}'] = mu
        row['tail_amplitude_v0'] = r.tail_amplitude
        if r.distances is not None:
            row['final_distance'] = r.distances[-1]
            row['final_averaged_distance'] = r.averaged_distances[-1]
        if r.lic is not None:
            row['lic_converged'] = float(r.lic.converged)
            row['aic_converged'] = float(r.aic.converged)
        if r.alpha is not None:
            row['alpha'] = r.alpha
        row['weighted_reward_raw_mu'] = ConvergenceAnalysis.weighted_reward(
            values[0], values[1:], theta, np.maximum(report.mu_hat_star, 0.0))
        row['weighted_reward_exp_mu'] = ConvergenceAnalysis.weighted_reward(
            values[0], values[1:], theta, ConvergenceAnalysis.sigmoid_mu_hat(report.mu_hat_star))
        row['penalized_reward'] = ConvergenceAnalysis.penalized_reward(values[0], values[1:], theta)
        rows.append(row)

    per_seed = pd.DataFrame(rows)
    summary = pd.DataFrame({
        'metric': per_seed.columns,
        'mean': per_seed.mean().to_numpy(),
        'stderr': per_seed.sem().to_numpy(),
        'n': per_seed.count().to_numpy(),
    })
    extra = pd.DataFrame({
        'metric': ['seeds_failed'] + [f'mu_hat_star{n + 1}_{report.mu_hat_source}' for n in range(len(report.mu_hat_star))],
        'mean': [float(len(report.failed))] + [float(m) for m in report.mu_hat_star],
        'stderr': np.nan,
        'n': len(report.results),
    })
    return pd.concat([summary, extra], ignore_index=True)


def run_experiment(config: RunConfig) -> ConvergenceReport:
    """运行一次多种子实验"""
    return ExperimentRunner(config).run()


class SweepRunner:
    """参数网格扫描"""

    def __init__(self, base: RunConfig, grid: Dict[str, Sequence[Any]]):
        self.base = base
        self.grid = grid

    def combinations(self) -> List[Dict[str, Any]]:
        keys = list(self.grid.keys())
        return [dict(zip(keys, values)) for values in itertools.product(*self.grid.values())]

    def _config_for(self, params: Dict[str, Any], index: int) -> RunConfig:
        """网格键为 RunConfig 字段名或 solver_config.<字段名>"""
        data = self.base.to_dict()
        for key, value in params.items():
            if key.startswith('solver_config.'):
                data['solver_config'][key.split('.', 1)[1]] = value
            elif key.startswith('env.'):
                data['env']['parameters'][key.split('.', 1)[1]] = value
            else:
                data[key] = value
        if self.base.out_dir:
            data['out_dir'] = os.path.join(self.base.out_dir, f"run_{index:03d}")
        return RunConfig.from_dict(data)

    def run(self) -> pd.DataFrame:
        """
        逐个组合运行实验

        Returns:
            每个组合一行：参数、成功种子数、v0 均值、最终距离均值与错误信息
        """
        combinations = self.combinations()
        logger.info(f"开始参数扫描，共 {len(combinations)} 种组合")
        rows = []
        for i, params in enumerate(combinations):
            row: Dict[str, Any] = {'run': i, **{k: json.dumps(v) if isinstance(v, (list, dict)) else v
                                               for k, v in params.items()}}
            try:
                report = run_experiment(self._config_for(params, i))
                indexed = report.summary.set_index('metric')['mean']
                row['seeds_ok'] = len(report.succeeded)
                row['v0_mean'] = indexed.get('v0', np.nan)
                row['final_distance_mean'] = indexed.get('final_distance', np.nan)
                row['lic_converged_mean'] = indexed.get('lic_converged', np.nan)
                row['error'] = ''
            except Exception as e:
                logger.warning(f"参数组合 {params} 执行失败: {e}")
                row['seeds_ok'] = 0
                row['error'] = f"{type(e).__name__}: {e}"
            rows.append(row)

        frame = pd.DataFrame(rows)
        if self.base.out_dir:
            write_csv(frame, os.path.join(self.base.out_dir, 'sweep.csv'))
        logger.info(f"参数扫描完成，{int((frame['error'] == '').sum())}/{len(frame)} 种组合成功")
        return frame


def run_sweep(sweep_config: Dict[str, Any]) -> pd.DataFrame:
    """
    运行参数扫描

    Args:
        sweep_config: {'base': RunConfig 字典, 'grid': {字段: 取值列表}}
    """
    if 'base' not in sweep_config or 'grid' not in sweep_config:
        raise ValidationError("扫描配置需要 base 与 grid 字段")
    grid = sweep_config['grid']
    if not isinstance(grid, dict) or not grid or any(len(v) == 0 for v in grid.values()):
        raise ValidationError("grid 必须是非空的 {字段: 非空列表}")
    return SweepRunner(RunConfig.from_dict(sweep_config['base']), grid).run()


def load_sweep_config(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"无法读取扫描配置 {path}: {e}")


def game_for(algo: GameAlgorithm, strong_monotonicity: float = 0.0) -> Tuple[BilinearGame, Tuple, np.ndarray]:
    """乘性权重算法用单纯形上的猜硬币博弈，其余算法用 xy 博弈；返回 (博弈, 初始点, 鞍点)"""
    if algo in (GameAlgorithm.MWU, GameAlgorithm.OMWU):
        return BilinearGame.matching_pennies(), ([0.9, 0.1], [0.2, 0.8]), np.full(4, 0.5)
    return BilinearGame.xy_game(strong_monotonicity), ([1.0], [1.0]), np.zeros(2)


def run_game_experiment(algo: str, eta: float, iters: int, out_dir: Optional[str] = None,
                        strong_monotonicity: float = 0.0, stride: int = 1) -> Tuple[IterateTrace, pd.DataFrame]:
    """
    运行双线性博弈实验

    Args:
        algo: 算法名称
        eta: 常数步长
        iters: 迭代次数
        out_dir: 输出目录，写出 <algo>.csv 与 <algo>.svg
        strong_monotonicity: xy 博弈的强单调系数
        stride: 记录间隔

    Returns:
        (轨迹, 数据表)
    """
    algorithm = GameAlgorithm.parse(algo)
    game, init, saddle = game_for(algorithm, strong_monotonicity)
    trace = solve_game(game, algorithm, StepSchedule.constant(eta), init, iters, stride)

    frame = trace.to_frame()
    points = np.hstack([trace.xs(), trace.ys()])
    frame['dist_to_saddle'] = np.linalg.norm(points - saddle, axis=1)

    if out_dir:
        write_csv(frame, os.path.join(out_dir, f"{algorithm.value}.csv"))
        write_svg_chart(os.path.join(out_dir, f"{algorithm.value}.svg"),
                        {algorithm.value: frame['dist_to_saddle'].to_numpy()},
                        x=frame['iter'].to_numpy(), title=f"{algorithm.value}, eta = {eta}",
                        ylabel='distance to saddle', log_scale=True)
    logger.info(f"博弈实验完成: {algorithm.value}，最终距离 {frame['dist_to_saddle'].iloc[-1]:.6g}")
    return trace, frame
