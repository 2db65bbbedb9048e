from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import SubLaplacianException
from sublaplacian_sdk.group.type import GroupSpec
from sublaplacian_sdk.methods import (
    BlockParams,
    ClusterSpec,
    ComplexTime,
    JointGrid,
    MultiplierPair,
    MuDecomposition,
    QuadratureConfig,
    check_homogeneity,
    classify,
    conv_kernel_eval,
    decompose,
    dispersive_scan,
    ell0_threshold,
    heat_kernel,
    heat_kernel_expansion,
    load_group,
    norm_1to2_exact,
    norm_p_to_2_lower,
    plancherel_kernel_norm,
    restriction_ratio,
    restriction_ratio_grid,
    validate,
)
from sublaplacian_sdk.methods.cluster import NormEstimate
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.restriction import JointMultiplierResult, apply_joint_multiplier
from sublaplacian_sdk.methods.typing import (
    ClassificationReport,
    DispersiveReport,
    HomogeneityReport,
    ValidationReport,
)


class SubLaplacian:
    decomposition = None
    block_params = None

    def __init__(self, group: Union[GroupSpec, Dict[str, Any], str], **kwargs):
        """
        @param group: GroupSpec, its dict form, a JSON file path or a preset name like "heisenberg:1"
        @param kwargs: Overrides of settings in sublaplacian_sdk.config
        """
        self.spec = load_group(group)
        self._set_configs(kwargs)

    def _set_configs(self, kwargs: Dict):
        for key, value in kwargs.items():
            if not hasattr(config, key):
                raise SubLaplacianException(f"Unknown setting `{key}`.")
            setattr(config, key, value)

    def validate(self) -> ValidationReport:
        return validate(self.spec)

    def classify(self, samples: int = 16, seed: Optional[int] = None) -> ClassificationReport:
        return classify(self.spec, samples=samples, seed=seed)

    def decompose(self, mu: Sequence[float]) -> MuDecomposition:
        """
        Decomposes J_mu and keeps the result for the block based methods.

        @param mu: Nonzero covector of length d2
        @return: MuDecomposition
        """
        self.decomposition = decompose(self.spec, mu)
        self.block_params = self.decomposition.block_params
        return self.decomposition

    def check_homogeneity(self, mu: Sequence[float], s: float) -> HomogeneityReport:
        return check_homogeneity(self.spec, mu, s)

    def _block_params(self, block_params: Optional[BlockParams]) -> BlockParams:
        block_params = self.block_params if block_params is None else block_params
        if block_params is None:
            raise SubLaplacianException(
                "`decompose` should be called first or provide `block_params` param"
            )
        return block_params

    def heat_kernel(
        self,
        zeta: Union[ComplexTime, complex, float],
        x,
        block_params: Optional[BlockParams] = None,
    ) -> np.ndarray:
        """
        Mehler kernel of the anisotropic twisted Laplacian at complex time zeta.
        """
        return heat_kernel(zeta, self._block_params(block_params), x)

    def heat_kernel_expansion(
        self, t: float, x, lambda_max: float, block_params: Optional[BlockParams] = None
    ) -> np.ndarray:
        return heat_kernel_expansion(t, self._block_params(block_params), x, lambda_max)

    def dispersive_scan(
        self,
        alpha: float,
        n_samples: int = 64,
        seed: Optional[int] = None,
        block_params: Optional[BlockParams] = None,
    ) -> DispersiveReport:
        return dispersive_scan(self._block_params(block_params), alpha, n_samples, seed=seed)

    def cluster_norm_1to2(self, K: int, block_params: Optional[BlockParams] = None) -> float:
        """
        @return: Exact L1 -> L2 norm of the spectral cluster [K, K+1).
        """
        return norm_1to2_exact(ClusterSpec(K, self._block_params(block_params)))

    def cluster_norm_lower(
        self,
        K: int,
        p: float,
        grid: Grid,
        block_params: Optional[BlockParams] = None,
        **kwargs,
    ) -> NormEstimate:
        """
        Power method lower bound for the L^p -> L2 norm of the cluster [K, K+1) on `grid`.

        @param kwargs: restarts, seed, normalized (see norm_p_to_2_lower)
        """
        return norm_p_to_2_lower(ClusterSpec(K, self._block_params(block_params)), p, grid, **kwargs)

    def cluster_series(
        self, K_values: Sequence[int], block_params: Optional[BlockParams] = None
    ) -> List[Tuple[int, float]]:
        params = self._block_params(block_params)
        return [(K, norm_1to2_exact(ClusterSpec(K, params))) for K in K_values]

    def plancherel_kernel_norm(self, mp: MultiplierPair, quad: Optional[QuadratureConfig] = None) -> float:
        return plancherel_kernel_norm(self.spec, mp, quad)

    def ell0_threshold(self, A: Tuple[float, float], chi_support: Tuple[float, float]) -> int:
        return ell0_threshold(self.spec, A, chi_support)

    def conv_kernel_eval(self, mp: MultiplierPair, x, u, quad: Optional[QuadratureConfig] = None) -> complex:
        return conv_kernel_eval(self.spec, mp, x, u, quad)

    def apply_joint_multiplier(self, f: np.ndarray, mp: MultiplierPair, grid: JointGrid) -> JointMultiplierResult:
        return apply_joint_multiplier(self.spec, f, mp, grid)

    def restriction_ratio(self, mp: MultiplierPair, bump_width: float = 0.05) -> float:
        return restriction_ratio(self.spec, mp, bump_width)

    def restriction_ratio_grid(self, mp: MultiplierPair, grid: JointGrid, bump_width: float = 1.0) -> float:
        return restriction_ratio_grid(self.spec, mp, grid, bump_width)
