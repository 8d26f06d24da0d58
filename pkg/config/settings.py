"""
ReLOAD 基准测试配置文件
"""

import os

# 应用程序基本信息
APP_NAME = "ReLOAD Bench"
APP_VERSION = "1.0.0"

# 数值容差配置
DOMAIN_TOL = 1e-9             # 定义域成员判定容差
ZERO_MASS_TOL = 1e-12         # 占用测度零质量行判定
SIMPLEX_PIVOT_TOL = 1e-10     # 单纯形主元容差
SIMPLEX_FEASIBILITY_TOL = 1e-9  # 第一阶段可行性容差
SIMPLEX_OPTIMALITY_TOL = 1e-9   # 约化成本最优性容差
SIMPLEX_RATIO_TIE_TOL = 1e-12   # 比值检验并列容差
DEGENERACY_TOL = 1e-10        # 基变量退化判定
SIMPLEX_MAX_ITER_FACTOR = 50  # 迭代上限 = 系数 * (行数 + 列数)

# 投影与谱估计配置
DYKSTRA_TOL = 1e-12
DYKSTRA_MAX_SWEEPS = 100000
POWER_ITERATION_STEPS = 200
POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_SEED = 0

# 求解器默认参数
DEFAULT_ETA_PI = 0.2
DEFAULT_ETA_MU = 0.05
DEFAULT_GAME_ETA = 0.1
DEFAULT_ITERATIONS = 5000
DEFAULT_GAME_ITERATIONS = 10000
DEFAULT_STRIDE = 1
DEFAULT_MU_CAP = 100.0
OCCUPANCY_STEP_SCALE = 0.4    # η = 0.4 / L̂

# 环境默认参数
PARADOX_GAMMA = 0.9
PARADOX_THRESHOLD = 0.5
CATCH_ROWS = 10
CATCH_COLS = 5
CATCH_GAMMA = 0.9
CATCH_CONSTRAINT_REWARD = 0.2
CATCH_CONSTRAINED_COLUMNS = 3
CATCH_EPISODE_BUDGET = 1.0    # 每回合约束预算，按行数归一化
RANDOM_CMDP_GAMMA = 0.9

# 暴力验证配置
BRUTE_FORCE_MAX_CELLS = 6     # S * A 上限
BRUTE_FORCE_MAX_CONSTRAINTS = 2
BRUTE_FORCE_MAX_GRID = 5000000
BRUTE_FORCE_CHUNK = 200000
BRUTE_FORCE_MU_BOUND = 100.0

# 收敛诊断配置
LIC_TOL_TOY = 1e-3
LIC_TOL_CATCH = 1e-2
LIC_WINDOW_FRACTION = 0.1
EXTREME_THRESHOLD_FRACTION = 0.01

# 导出配置
EXPORT_DIR = os.path.join(os.path.dirname(__file__), '..', 'exports')
CSV_FLOAT_FORMAT = '%.17g'
CHART_DPI = 100
CHART_FIGSIZE = (10, 6)

# 日志配置
LOG_LEVEL = 'INFO'
LOG_FILE = os.path.join(os.path.dirname(__file__), '..', 'logs', 'reload.log')

# 命令行退出码
EXIT_OK = 0
EXIT_VALIDATION_ERROR = 2
EXIT_SOLVER_ERROR = 3
EXIT_ORACLE_ERROR = 4

# 注册名称
GAME_ALGORITHMS = ['gda', 'ogda', 'mwu', 'omwu', 'eg', 'peg', 'rg', 'singly']
SOLVER_NAMES = ['reload-mdpi', 'mu-mdpi', 'peg-mdpi', 'reload-occ', 'fixed-mu']
ENV_NAMES = ['paradox', 'catch', 'random']
