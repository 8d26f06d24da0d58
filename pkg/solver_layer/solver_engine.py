"""
求解器引擎模块
按命令行名称注册和运行 CMDP 求解器
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from cmdp_layer import Cmdp, Multipliers
from oracle_layer import solve_cmdp_lp
from utils.exceptions import ValidationError
from .mdpi_solvers import fixed_mu_solver, mu_mdpi, peg_mdpi, reload_mdpi
from .occupancy_solver import reload_occupancy
from .solver_config import CmdpTrace, SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class SolverSpec:
    """已注册的求解器"""
    name: str
    function: Callable[..., CmdpTrace]
    description: str = ''
    needs_mu_star: bool = False


class SolverEngine:
    """求解器注册表"""

    def __init__(self):
        self.solvers: Dict[str, SolverSpec] = {}

    def register_solver(self, spec: SolverSpec):
        self.solvers[spec.name] = spec
        logger.debug(f"注册求解器: {spec.name}")

    def get_solver(self, name: str) -> SolverSpec:
        if name not in self.solvers:
            raise ValidationError(f"未知求解器 {name}，可选: {self.list_solvers()}")
        return self.solvers[name]

    def list_solvers(self) -> List[str]:
        return list(self.solvers.keys())

    def run(self, name: str, cmdp: Cmdp, config: SolverConfig,
            mu_star: Optional[Union[Multipliers, np.ndarray]] = None) -> CmdpTrace:
        """
        运行指定求解器

        Args:
            name: 注册名称
            cmdp: 约束 MDP
            config: 求解器配置
            mu_star: 固定乘子；fixed-mu 求解器未给出时由线性规划预言机求得

        Returns:
            求解轨迹
        """
        spec = self.get_solver(name)
        if not spec.needs_mu_star:
            return spec.function(cmdp, config)
        if mu_star is None:
            saddle = solve_cmdp_lp(cmdp, classify=False)
            if not saddle.is_feasible:
                raise ValidationError(f"{cmdp.name} 不可行，无法得到 μ*")
            mu_star = saddle.mu_star
            logger.info(f"{name}: 使用预言机 μ* = {mu_star.mu}")
        return spec.function(cmdp, mu_star, config)


def create_default_solvers() -> Dict[str, SolverSpec]:
    """创建默认求解器"""
    specs = [
        SolverSpec('reload-mdpi', reload_mdpi, '乐观 MDPI（ReLOAD）'),
        SolverSpec('mu-mdpi', mu_mdpi, '非乐观 MDPI 基线'),
        SolverSpec('peg-mdpi', peg_mdpi, '过去外梯度 MDPI'),
        SolverSpec('reload-occ', reload_occupancy, '占用测度空间的凸 ReLOAD'),
        SolverSpec('fixed-mu', fixed_mu_solver, '固定乘子标量化基线', needs_mu_star=True),
    ]
    return {spec.name: spec for spec in specs}
