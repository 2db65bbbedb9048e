from sublaplacian_sdk.group.type import GroupClass, GroupSpec
from sublaplacian_sdk.group.presets import (
    heisenberg,
    htype_quaternion,
    metivier_aniso,
    free_n32,
    preset,
    standard_symplectic,
)
