"""
博弈层模块
Bregman 几何、（乐观）镜像下降与双线性鞍点动力学
"""

from .geometry import (
    GeometryKind, DomainKind, Domain, BregmanGeometry,
    bregman_divergence, md_step, omd_step, optimistic_step,
    project_simplex, log_mirror_step
)
from .bilinear_game import (
    GameAlgorithm, BilinearGame, StepSchedule, IterateTrace,
    solve_game, average_trace, running_average
)
from .dynamics_analysis import (
    singly_optimistic_jacobian, singly_optimistic_spectral_radius,
    estimate_spectral_norm, fit_linear_rate, skew_operator_norm
)


# 便捷函数
def solve_xy_game(algo: str, eta: float, iters: int, init=(1.0, 1.0),
                  strong_monotonicity: float = 0.0, stride: int = 1) -> IterateTrace:
    """在 min_x max_y xy（可加强单调项）上运行指定算法"""
    game = BilinearGame.xy_game(strong_monotonicity)
    return solve_game(game, algo, StepSchedule.constant(eta),
                      ([init[0]], [init[1]]), iters, stride)


__all__ = [
    'GeometryKind', 'DomainKind', 'Domain', 'BregmanGeometry',
    'bregman_divergence', 'md_step', 'omd_step', 'optimistic_step',
    'project_simplex', 'log_mirror_step',
    'GameAlgorithm', 'BilinearGame', 'StepSchedule', 'IterateTrace',
    'solve_game', 'average_trace', 'running_average',
    'singly_optimistic_jacobian', 'singly_optimistic_spectral_radius',
    'estimate_spectral_norm', 'fit_linear_rate', 'skew_operator_norm',
    'solve_xy_game'
]
