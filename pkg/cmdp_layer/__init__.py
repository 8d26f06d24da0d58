"""
约束 MDP 层模块
表格型 CMDP 数据模型、精确策略评估与流多面体投影
"""

from .cmdp import (
    Cmdp, Policy, OccupancyMeasure, Multipliers, QValues, atomic_write_text
)
from .evaluation import (
    PolicyEvaluation, evaluate_all, policy_eval, policy_transition,
    occupancy_from_policy, policy_from_occupancy,
    value_of, values, mixed_reward, mixed_q,
    lagrangian, lagrangian_gradients, bellman_residual
)
from .flow_projection import (
    FlowPolytope, flow_matrix, flow_rhs, flow_residual, project_onto_K
)

__all__ = [
    'Cmdp', 'Policy', 'OccupancyMeasure', 'Multipliers', 'QValues', 'atomic_write_text',
    'PolicyEvaluation', 'evaluate_all', 'policy_eval', 'policy_transition',
    'occupancy_from_policy', 'policy_from_occupancy',
    'value_of', 'values', 'mixed_reward', 'mixed_q',
    'lagrangian', 'lagrangian_gradients', 'bellman_residual',
    'FlowPolytope', 'flow_matrix', 'flow_rhs', 'flow_residual', 'project_onto_K'
]
