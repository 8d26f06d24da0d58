"""
求解器层模块
CMDP 鞍点求解器：ReLOAD-MDPI、μ-MDPI、PEG-MDPI、占用测度空间 ReLOAD 与固定乘子基线
"""

from .solver_config import (
    PolicyGeometry, InitMode, SolverConfig, CmdpRecord, CmdpTrace, initial_policy
)
from .mdpi_solvers import (
    PolicyIterate, advantage, reload_mdpi, mu_mdpi, peg_mdpi, fixed_mu_solver, extract_saddle_estimate
)
from .occupancy_solver import reload_occupancy, occupancy_step_size
from .solver_engine import SolverSpec, SolverEngine

__all__ = [
    'PolicyGeometry', 'InitMode', 'SolverConfig', 'CmdpRecord', 'CmdpTrace', 'initial_policy',
    'PolicyIterate', 'advantage', 'reload_mdpi', 'mu_mdpi', 'peg_mdpi', 'fixed_mu_solver',
    'extract_saddle_estimate', 'reload_occupancy', 'occupancy_step_size',
    'SolverSpec', 'SolverEngine', 'get_solver_engine', 'create_default_solvers', 'run_solver'
]

# 创建默认求解器引擎
_default_engine = None


def get_solver_engine() -> SolverEngine:
    """获取求解器引擎实例"""
    global _default_engine
    if _default_engine is None:
        _default_engine = SolverEngine()
        for spec in create_default_solvers().values():
            _default_engine.register_solver(spec)
    return _default_engine


def create_default_solvers():
    """创建默认求解器"""
    from .solver_engine import create_default_solvers
    return create_default_solvers()


# 便捷函数
def run_solver(name: str, cmdp, config: SolverConfig = None, mu_star=None) -> CmdpTrace:
    """
    运行求解器的便捷函数

    Args:
        name: 求解器名称
        cmdp: 约束 MDP
        config: 求解器配置，默认 SolverConfig()
        mu_star: fixed-mu 求解器的固定乘子

    Returns:
        求解轨迹
    """
    return get_solver_engine().run(name, cmdp, config or SolverConfig(), mu_star)
