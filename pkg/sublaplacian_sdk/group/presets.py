from typing import Callable, Dict, List

import numpy as np

from sublaplacian_sdk.exceptions import ConfigurationError
from sublaplacian_sdk.group.type import GroupSpec

ROTATION_2D = np.array([[0.0, -1.0], [1.0, 0.0]])

# Left multiplication by i, j, k on the quaternions in the basis (1, i, j, k)
QUATERNION_UNITS = [
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
]


def standard_symplectic(m: int) -> np.ndarray:
    """
    @param m: Half dimension.
    @return: [[0, -I_m], [I_m, 0]], the matrix of the standard symplectic form.
    """
    identity = np.eye(m)
    zero = np.zeros((m, m))
    return np.block([[zero, -identity], [identity, zero]])


def heisenberg(m: int = 1) -> GroupSpec:
    if m < 1:
        raise ConfigurationError(f"Heisenberg preset needs m >= 1. Got {m}.")

    return GroupSpec(
        d1=2 * m,
        d2=1,
        structure=standard_symplectic(m)[np.newaxis],
        label=f"heisenberg:{m}",
        preset=True,
    )


def htype_quaternion() -> GroupSpec:
    return GroupSpec(
        d1=4,
        d2=3,
        structure=np.array(QUATERNION_UNITS, dtype=float),
        label="htype-quaternion",
        preset=True,
    )


def metivier_aniso(b1: float = 1.0, b2: float = 3.0) -> GroupSpec:
    structure = np.zeros((1, 4, 4))
    structure[0, :2, :2] = b1 * ROTATION_2D
    structure[0, 2:, 2:] = b2 * ROTATION_2D

    return GroupSpec(
        d1=4,
        d2=1,
        structure=structure,
        label=f"metivier-aniso:{b1:g},{b2:g}",
        preset=True,
    )


def free_n32() -> GroupSpec:
    # J^(k) x = e_k × x, so that <J_mu x, x'> = det(mu, x, x')
    structure = np.zeros((3, 3, 3))
    for k in range(3):
        for i in range(3):
            basis = np.zeros(3)
            basis[i] = 1.0
            structure[k, :, i] = np.cross(np.eye(3)[k], basis)

    return GroupSpec(d1=3, d2=3, structure=structure, label="free-n32", preset=True)


PRESETS: Dict[str, Callable[..., GroupSpec]] = {
    "heisenberg": lambda *args: heisenberg(*[int(arg) for arg in args]),
    "htype-quaternion": htype_quaternion,
    "metivier-aniso": lambda *args: metivier_aniso(*[float(arg) for arg in args]),
    "free-n32": free_n32,
}


def preset(name: str) -> GroupSpec:
    """
    @param name: Preset name with optional comma separated arguments, e.g. "heisenberg:2" or "metivier-aniso:1,3".
    @return: Group spec of the preset.
    """
    key, _, raw_args = name.strip().partition(":")
    if key not in PRESETS:
        raise ConfigurationError(
            f"Unknown group preset `{key}`. Known presets: {', '.join(PRESETS)}"
        )

    args: List[str] = [arg for arg in raw_args.split(",") if arg] if raw_args else []

    try:
        return PRESETS[key](*args)
    except (TypeError, ValueError) as error:
        raise ConfigurationError(f"Bad arguments for preset `{key}`: {error}")
