import math

# 1 / sinh(1), coth(1)
S_AT_I = 0.850918
T_AT_I = 1.313035

# (4 pi sinh 1)^{-1}: H1 heat kernel at t = 1, x = 0
HEAT_KERNEL_AT_ORIGIN = 0.067713

# 1 / (3 pi), 2 / pi^3
FEJER_AT_CENTER = 0.106103
FEJER_AT_PI = 0.064510

# Cowling-Sikora norm of F(lambda) = lambda on [0, 1) with M = 2
COWLING_SIKORA_LINEAR = 0.7906

H1_CLUSTER_NORM = math.sqrt(1 / (2 * math.pi))

# A = [1, 4], chi supported in [0.5, 2]
RESTRICTION_A = (1.0, 4.0)
RESTRICTION_CHI = (0.5, 2.0)
H1_ELL0 = 3

FREE_N32_J_E3 = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]

INLINE_H1 = {
    "label": "inline-h1",
    "d1": 2,
    "d2": 1,
    "structure": [[[0.0, -1.0], [1.0, 0.0]]],
}

DEPENDENT_GROUP = {
    "d1": 2,
    "d2": 2,
    "structure": [[[0.0, -1.0], [1.0, 0.0]], [[0.0, -2.0], [2.0, 0.0]]],
}

NON_SKEW_GROUP = {
    "d1": 2,
    "d2": 1,
    "structure": [[[1.0, 0.0], [0.0, 1.0]]],
}
