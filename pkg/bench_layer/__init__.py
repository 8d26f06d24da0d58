"""
基准测试层模块
多种子实验、参数扫描、博弈实验与 CSV/SVG 报告
"""

from .report_writer import (
    frame_to_csv_text, write_csv, read_series_csv, render_line_chart, write_svg_chart
)
from .experiment_runner import (
    RunConfig, SeedResult, ConvergenceReport, ExperimentRunner, SweepRunner,
    build_summary, run_experiment, run_sweep, load_sweep_config, game_for, run_game_experiment
)

__all__ = [
    'frame_to_csv_text', 'write_csv', 'read_series_csv', 'render_line_chart', 'write_svg_chart',
    'RunConfig', 'SeedResult', 'ConvergenceReport', 'ExperimentRunner', 'SweepRunner',
    'build_summary', 'run_experiment', 'run_sweep', 'load_sweep_config', 'game_for',
    'run_game_experiment'
]
