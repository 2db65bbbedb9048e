import numpy as np

from sublaplacian_sdk.exceptions import DimensionMismatch, GridError, InvalidParameter
from sublaplacian_sdk.group import preset
from sublaplacian_sdk.methods import (
    Grid,
    check_homogeneity,
    conjugation_residual,
    decompose,
    decompose_many,
    random_directions,
)
from tests.utils import MockTestCase


class DecomposeTest(MockTestCase):
    def test_heisenberg(self):
        decomposition = decompose(preset("heisenberg:1"), [2.0])

        np.testing.assert_allclose(decomposition.b, [2.0])
        self.assertEqual(decomposition.signature, (1, (1,), 0))
        np.testing.assert_allclose(decomposition.projections[1], np.eye(2), atol=1e-12)

    def test_free_n32(self):
        decomposition = decompose(preset("free-n32"), [0.0, 0.0, 1.0])

        np.testing.assert_allclose(decomposition.b, [1.0])
        self.assertEqual(decomposition.r0, 1)
        np.testing.assert_allclose(decomposition.projections[0], np.diag([0.0, 0.0, 1.0]), atol=1e-12)
        np.testing.assert_allclose(decomposition.projections[1], np.diag([1.0, 1.0, 0.0]), atol=1e-12)

    def test_metivier_blocks_are_decreasing(self):
        decomposition = decompose(preset("metivier-aniso:1,3"), [1.0])

        np.testing.assert_allclose(decomposition.b, [3.0, 1.0])
        self.assertEqual(decomposition.r, (1, 1))
        self.assertEqual(decomposition.block_params.d1, 4)

    def test_quaternion_single_block(self):
        decomposition = decompose(preset("htype-quaternion"), [0.6, 0.0, 0.8])

        np.testing.assert_allclose(decomposition.b, [1.0])
        self.assertEqual(decomposition.r, (2,))

    def test_residuals(self):
        for name in ("heisenberg:2", "htype-quaternion", "metivier-aniso:1,3", "free-n32"):
            spec = preset(name)
            for decomposition in decompose_many(spec, random_directions(spec.d2, 100, seed=5)):
                self.assertLessEqual(decomposition.max_residual(), 1e-8, name)

    def test_rotation_is_symplectic(self):
        decomposition = decompose(preset("metivier-aniso:1,3"), [-0.7])
        rotation = decomposition.rotation

        np.testing.assert_allclose(rotation.T @ rotation, np.eye(4), atol=1e-10)
        np.testing.assert_allclose(
            rotation.T @ decomposition.j_mu @ rotation,
            decomposition.block_params.twist_matrix(),
            atol=1e-10,
        )

    def test_to_dict(self):
        data = decompose(preset("free-n32"), [1.0, 2.0, 2.0]).to_dict(matrices=True)

        self.assertEqual(data["r0"], 1)
        self.assertAlmostEqual(data["b"][0], 3.0)
        self.assertIn("rotation", data)
        self.assertIn("symplectic", data["residuals"])

    def test_bad_mu(self):
        spec = preset("free-n32")
        with self.assertRaises(InvalidParameter):
            decompose(spec, [0.0, 0.0, 0.0])

        with self.assertRaises(DimensionMismatch):
            decompose(spec, [1.0, 0.0])

        with self.assertRaises(InvalidParameter):
            decompose(spec, [1.0, 0.0, 0.0], cluster_tol=0)

    def test_decompose_many_keeps_order(self):
        spec = preset("heisenberg:1")
        self.mocker.patch("sublaplacian_sdk.config.POOL_MAX_BUNCH", 2)

        decompositions = decompose_many(spec, [[float(k)] for k in range(1, 8)])
        np.testing.assert_allclose([d.b[0] for d in decompositions], range(1, 8))


class HomogeneityTest(MockTestCase):
    def test_scaling(self):
        self.assertTrue(check_homogeneity(preset("heisenberg:1"), [1.0], 2.0)["passed"])
        self.assertTrue(check_homogeneity(preset("free-n32"), [0.2, -0.4, 0.1], 3.0)["passed"])

        report = check_homogeneity(preset("metivier-aniso:1,3"), [1.0], 0.5)
        self.assertTrue(report["passed"])
        np.testing.assert_allclose(decompose(preset("metivier-aniso:1,3"), [0.5]).b, [1.5, 0.5])

    def test_nonpositive_scale(self):
        with self.assertRaises(InvalidParameter):
            check_homogeneity(preset("heisenberg:1"), [1.0], 0.0)


class ConjugationTest(MockTestCase):
    def test_heisenberg(self):
        grid = Grid.centered(121, 3.0)
        self.assertLessEqual(conjugation_residual(preset("heisenberg:1"), [-1.5], grid), 5e-3)

    def test_metivier(self):
        grid = Grid(points=9, spacing=0.05, dim=4)
        self.assertLessEqual(conjugation_residual(preset("metivier-aniso:1,3"), [1.0], grid), 5e-3)

    def test_coarse_grid(self):
        with self.assertRaises(GridError):
            conjugation_residual(preset("heisenberg:1"), [1.0], Grid.centered(9, 3.0))

    def test_zero_mu(self):
        with self.assertRaises(InvalidParameter):
            conjugation_residual(preset("heisenberg:1"), [0.0], Grid.centered(121, 3.0))
