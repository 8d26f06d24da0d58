# UI层模块
from .cli import build_parser, main, parse_seeds, run_config_from_args

__all__ = ['build_parser', 'main', 'parse_seeds', 'run_config_from_args']
