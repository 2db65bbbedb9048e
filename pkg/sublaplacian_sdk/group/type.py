from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, Any

import numpy as np

from sublaplacian_sdk.exceptions import ConfigurationError, DimensionMismatch


class GroupClass(IntEnum):
    # Ordered so that a larger value implies every smaller class
    General = 0
    Metivier = 1
    HeisenbergType = 2


@dataclass(eq=False)
class GroupSpec:
    """
    Two-step stratified group given by its structure matrices.

    `structure[k]` is the d1×d1 skew matrix J^(k+1); J_mu = sum_k mu_k J^(k+1).
    """

    d1: int
    d2: int
    structure: np.ndarray
    label: str = ""
    preset: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.structure = np.asarray(self.structure, dtype=float)

        if self.structure.ndim == 2 and self.d2 == 1:
            self.structure = self.structure[np.newaxis]

        expected = (self.d2, self.d1, self.d1)
        if self.structure.shape != expected:
            raise DimensionMismatch(
                f"Structure should have shape {expected}. Got {self.structure.shape}."
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroupSpec":
        missing = [key for key in ("d1", "d2", "structure") if key not in data]
        if missing:
            raise ConfigurationError(f"Group spec is missing fields: {', '.join(missing)}")

        try:
            d1, d2 = int(data["d1"]), int(data["d2"])
        except (TypeError, ValueError):
            raise ConfigurationError("Group spec fields `d1` and `d2` should be integers")

        if d1 < 1 or d2 < 1:
            raise ConfigurationError(f"Group dimensions should be positive. Got d1={d1}, d2={d2}.")

        return cls(
            d1=d1,
            d2=d2,
            structure=np.array(data["structure"], dtype=float),
            label=str(data.get("label", "")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "d1": self.d1,
            "d2": self.d2,
            "structure": self.structure.tolist(),
        }
