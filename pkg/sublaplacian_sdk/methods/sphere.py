import itertools
from functools import lru_cache
from typing import Tuple

import numpy as np

from sublaplacian_sdk.exceptions import InvalidParameter

# Octahedral orbits of the 86 point rule: (kind, a, weight), weights sum to 1
LEBEDEV_86_ORBITS = (
    ("axis", 0.0, 0.1154401154401154e-1),
    ("diagonal", 0.0, 0.1194390908585628e-1),
    ("aab", 0.3696028464541502e0, 0.1111055571060340e-1),
    ("aab", 0.6943540066026664e0, 0.1187650129453714e-1),
    ("ab0", 0.3742430390903412e0, 0.1181230374690448e-1),
)

CIRCLE_NODES = 64


def _generator(kind: str, a: float) -> Tuple[float, float, float]:
    if kind == "axis":
        return 1.0, 0.0, 0.0
    if kind == "diagonal":
        c = np.sqrt(1.0 / 3.0)
        return c, c, c
    if kind == "aab":
        return a, a, float(np.sqrt(1.0 - 2.0 * a * a))
    if kind == "ab0":
        return a, float(np.sqrt(1.0 - a * a)), 0.0
    raise InvalidParameter(f"Unknown orbit kind `{kind}`.")


def _orbit(point: Tuple[float, float, float]) -> np.ndarray:
    """
    All coordinate permutations with all sign changes of `point`, without repeats.
    """
    points = set()
    for permutation in itertools.permutations(point):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            points.add(tuple(float(s * c) + 0.0 for s, c in zip(signs, permutation)))
    return np.array(sorted(points))


@lru_cache(maxsize=1)
def lebedev_86() -> Tuple[np.ndarray, np.ndarray]:
    """
    @return: 86 nodes on S^2 and weights summing to 1.
    """
    nodes, weights = [], []
    for kind, a, weight in LEBEDEV_86_ORBITS:
        orbit = _orbit(_generator(kind, a))
        nodes.append(orbit)
        weights.append(np.full(len(orbit), weight))

    return np.vstack(nodes), np.concatenate(weights)


def sphere_quadrature(d2: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Quadrature on the unit sphere of R^d2, weights summing to its surface measure.

    @return: Nodes (M, d2) and weights (M,).
    """
    if d2 == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])

    if d2 == 2:
        angles = 2 * np.pi * np.arange(CIRCLE_NODES) / CIRCLE_NODES
        nodes = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return nodes, np.full(CIRCLE_NODES, 2 * np.pi / CIRCLE_NODES)

    if d2 == 3:
        nodes, weights = lebedev_86()
        return nodes, 4 * np.pi * weights

    raise InvalidParameter(f"Sphere quadrature is available for d2 <= 3. Got {d2}.")
