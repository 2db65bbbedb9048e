from typing import List, Optional

try:
    # For python >= 3.8
    from typing import TypedDict
except ImportError:
    # For python 3.7
    from typing_extensions import TypedDict

from sublaplacian_sdk.group.type import GroupClass


class ValidationReport(TypedDict):
    passed: bool
    skew_residual: float
    rank: int
    errors: List[str]


class ClassificationReport(TypedDict):
    group_class: GroupClass
    directions: List[List[float]]
    htype_residual: float
    min_singular_value: float
    probabilistic: bool


class DecompositionResiduals(TypedDict):
    spectral: float
    idempotency: float
    trace: float
    orthogonality: float
    completeness: float
    rotation: float
    commutation: float
    symplectic: float


class HomogeneityReport(TypedDict):
    passed: bool
    signature_match: bool
    b_residual: float
    projection_residual: float


class DispersiveRow(TypedDict):
    zeta_re: float
    zeta_im: float
    sup_value: float
    bound_value: float


class DispersiveReport(TypedDict):
    constant: float
    origin_is_sup: bool
    rows: List[DispersiveRow]


class ScalingReport(TypedDict):
    passed: bool
    unit_norm: float
    rescaled_norm: float
    ratio: float
    expected: float
    members_match: bool


class EnvelopeReport(TypedDict):
    passed: bool
    constant: float
    worst_ratio: float
    worst_K: Optional[int]


class SandwichReport(TypedDict):
    passed: bool
    l2_norm: float
    cs_norm: float


class Verdict(TypedDict):
    criterion: str
    passed: bool
    observed: str
    expected: str


class BundleSummary(TypedDict):
    text: str
    passed: int
    total: int
    failing: List[Verdict]
    plots: List[str]
