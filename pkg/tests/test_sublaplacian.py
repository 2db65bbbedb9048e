import math

import numpy as np

from sublaplacian_sdk import SubLaplacian, config
from sublaplacian_sdk.exceptions import SubLaplacianException
from sublaplacian_sdk.group.type import GroupClass
from sublaplacian_sdk.methods import BlockParams, MultiplierPair, SampledFunction
from tests.fixtures import H1_CLUSTER_NORM, H1_ELL0, HEAT_KERNEL_AT_ORIGIN, INLINE_H1, RESTRICTION_A, RESTRICTION_CHI
from tests.utils import MockTestCase


class SubLaplacianTest(MockTestCase):
    def setUp(self) -> None:
        self.sublaplacian = SubLaplacian("heisenberg:1")

    def test_config_overrides(self):
        self.mocker.patch.object(config, "CLUSTER_TOL", config.CLUSTER_TOL)
        SubLaplacian(INLINE_H1, CLUSTER_TOL=1e-4)
        self.assertEqual(config.CLUSTER_TOL, 1e-4)

        with self.assertRaises(SubLaplacianException):
            SubLaplacian(INLINE_H1, cluster_tolerance=1e-4)

    def test_group_queries(self):
        self.assertTrue(self.sublaplacian.validate()["passed"])
        self.assertEqual(self.sublaplacian.classify()["group_class"], GroupClass.HeisenbergType)
        self.assertTrue(self.sublaplacian.check_homogeneity([1.0], 3.0)["passed"])

    def test_decompose_first(self):
        with self.assertRaises(SubLaplacianException) as context:
            self.sublaplacian.heat_kernel(1.0, [0.0, 0.0])
        self.assertEqual(
            str(context.exception), "`decompose` should be called first or provide `block_params` param"
        )

    def test_block_methods(self):
        decomposition = self.sublaplacian.decompose([1.0])
        self.assertEqual(decomposition.r0, 0)

        value = self.sublaplacian.heat_kernel(1.0, [0.0, 0.0])
        self.assertAlmostEqual(float(value.real), HEAT_KERNEL_AT_ORIGIN, places=6)
        self.assertAlmostEqual(self.sublaplacian.cluster_norm_1to2(3), H1_CLUSTER_NORM)
        self.assertListEqual(
            [K for K, norm in self.sublaplacian.cluster_series(range(6)) if norm], [1, 3, 5]
        )

    def test_explicit_block_params(self):
        params = BlockParams(b=(2.0,), r=(1,))
        self.assertAlmostEqual(
            self.sublaplacian.cluster_norm_1to2(2, block_params=params), math.sqrt(2) * H1_CLUSTER_NORM
        )

        report = self.sublaplacian.dispersive_scan(0.5, n_samples=4, seed=1, block_params=params)
        self.assertEqual(len(report["rows"]), 4)

    def test_restriction(self):
        pair = MultiplierPair(
            F=SampledFunction.indicator(*RESTRICTION_A),
            chi=SampledFunction.smooth_bump(*RESTRICTION_CHI),
            ell=2,
        )

        self.assertEqual(self.sublaplacian.ell0_threshold(RESTRICTION_A, RESTRICTION_CHI), H1_ELL0)
        self.assertGreater(self.sublaplacian.plancherel_kernel_norm(pair), 0)
        self.assertGreater(self.sublaplacian.restriction_ratio(pair), 0)
        self.assertTrue(np.isfinite(self.sublaplacian.conv_kernel_eval(pair, [0.0, 0.0], [0.0])))
