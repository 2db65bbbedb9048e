import os

# Symplectic decomposition settings
CLUSTER_TOL: float = 1e-6
DECOMPOSE_RESIDUAL_TOL: float = 1e-8
CLASSIFY_TOL: float = 1e-10
SKEW_TOL: float = 1e-12

# Grid defaults (per 2D block)
GRID_POINTS: int = 64
GRID_HALF_WIDTH: float = 8.0
CONJUGATION_MAX_SPACING: float = 0.5
LAPLACIAN_MAX_SPACING: float = 0.2
BOUNDARY_DECAY_TOL: float = 1e-10
GRID_MAX_POINTS: int = 2 ** 18

# Mehler functions
POLE_GUARD: float = 1e-8
TAYLOR_SWITCH: float = 1e-4

# Cluster projections
POWER_MAX_ITERATIONS: int = 500
POWER_TOL: float = 1e-10
BASIS_MASS_TOL: float = 1e-8
CAPTURED_MASS_MIN: float = 0.999

# Joint multiplier on the Heisenberg group
JOINT_MAX_LEVEL: int = 96
JOINT_NEGLIGIBLE_MASS: float = 1e-14

# Multipliers
SAMPLING_MAX_RELATIVE_SPACING: float = 1e-3
QUADRATURE_SLACK: float = 0.01

# Harness
DEFAULT_SEED: int = 42
MAX_WORKERS: int = int(os.getenv("TOOL_THREADS", "6"))
POOL_MAX_BUNCH: int = 16
POOL_EXECUTOR_TIMEOUT: int = 600
