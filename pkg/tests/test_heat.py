import math

import numpy as np

from sublaplacian_sdk.exceptions import DimensionMismatch, InvalidParameter, PoleProximityError
from sublaplacian_sdk.methods import (
    BlockParams,
    ComplexTime,
    Grid,
    damped_fejer,
    damped_fejer_floor,
    dispersive_blowup,
    dispersive_scan,
    fejer_fourier_check,
    fejer_pair,
    heat_apply,
    heat_kernel,
    heat_kernel_expansion,
    phi,
    s_fn,
    t_fn,
)
from tests.fixtures import FEJER_AT_CENTER, FEJER_AT_PI, HEAT_KERNEL_AT_ORIGIN, S_AT_I, T_AT_I
from tests.utils import MockTestCase

H1_BLOCK = BlockParams(b=(1.0,), r=(1,))


class MehlerFunctionsTest(MockTestCase):
    def test_values(self):
        self.assertEqual(s_fn(0), 1)
        self.assertEqual(t_fn(0), 1)
        self.assertAlmostEqual(s_fn(1j), S_AT_I, places=6)
        self.assertAlmostEqual(t_fn(1j), T_AT_I, places=6)
        self.assertAlmostEqual(s_fn(math.pi / 2), math.pi / 2)
        self.assertAlmostEqual(t_fn(math.pi / 2), 0.0)

    def test_taylor_branch_is_continuous(self):
        for zeta in (9e-5, 1.1e-4, 2e-4j):
            self.assertAlmostEqual(s_fn(zeta), 1 + zeta ** 2 / 6, places=12)
            self.assertAlmostEqual(t_fn(zeta), 1 - zeta ** 2 / 3, places=12)

    def test_poles(self):
        with self.assertRaises(PoleProximityError):
            s_fn(math.pi)

        with self.assertRaises(PoleProximityError):
            t_fn(-2 * math.pi + 1e-9j)


class ComplexTimeTest(MockTestCase):
    def test_rectangle(self):
        self.assertTrue(ComplexTime(0.5 + 0.2j, alpha=0.3).in_rectangle)
        self.assertFalse(ComplexTime(1.5 + 0.2j, alpha=0.3).in_rectangle)
        self.assertFalse(ComplexTime(0.5 + 0.2j).in_rectangle)

    def test_real_part(self):
        with self.assertRaises(InvalidParameter):
            ComplexTime(-0.1 + 1j)

        with self.assertRaises(InvalidParameter):
            heat_kernel(0.0, H1_BLOCK, [0.0, 0.0])


class HeatKernelTest(MockTestCase):
    def test_origin(self):
        self.assertAlmostEqual(float(heat_kernel(1.0, H1_BLOCK, [0.0, 0.0]).real), HEAT_KERNEL_AT_ORIGIN, places=6)

    def test_closed_form(self):
        t = 0.5
        x = np.array([[0.3, -0.4], [1.5, 2.0], [0.0, 0.0]])
        radius2 = np.sum(x ** 2, axis=1)
        expected = np.exp(-radius2 / (4 * math.tanh(t))) / (4 * math.pi * math.sinh(t))

        np.testing.assert_allclose(heat_kernel(t, H1_BLOCK, x), expected, rtol=1e-12)

    def test_flat_limit(self):
        p = BlockParams(b=(0.0,), r=(1,), r0=1)
        x = np.array([0.5, 1.0, -1.0])
        expected = (4 * math.pi * 0.7) ** -1.5 * math.exp(-np.sum(x ** 2) / (4 * 0.7))

        self.assertAlmostEqual(float(heat_kernel(0.7, p, x).real), expected, places=12)

    def test_expansion(self):
        rng = np.random.default_rng(42)
        for p in (H1_BLOCK, BlockParams(b=(1.0, math.sqrt(2)), r=(1, 1)), BlockParams(b=(2.0,), r=(1,), r0=1)):
            points = 1.5 * rng.standard_normal((25, p.d1))
            mehler = heat_kernel(0.5, p, points)
            expansion = heat_kernel_expansion(0.5, p, points, 40.0)
            self.assertLessEqual(np.max(np.abs(mehler - expansion)), 1e-8)

    def test_dimension(self):
        with self.assertRaises(DimensionMismatch):
            heat_kernel(1.0, H1_BLOCK, [0.0, 0.0, 0.0])

    def test_apply_on_ground_state(self):
        grid = Grid.centered(81, 10.0)
        points = np.stack(grid.coordinates(), axis=-1)
        inner = np.linalg.norm(points, axis=-1) <= 5.0
        f = phi(0, 1.0, 1, points)

        result = heat_apply(f, 1.0, H1_BLOCK, grid)
        self.assertRelativeClose(result[inner], math.exp(-1) * f[inner], 1e-4)

    def test_apply_on_laguerre_modes(self):
        grid = Grid.centered(113, 14.0)
        points = np.stack(grid.coordinates(), axis=-1)
        inner = np.linalg.norm(points, axis=-1) <= 5.0

        for k in range(6):
            f = phi(k, 1.0, 1, points)
            result = heat_apply(f, 0.5, H1_BLOCK, grid)
            self.assertRelativeClose(result[inner], math.exp(-0.5 * (2 * k + 1)) * f[inner], 1e-4)

    def test_semigroup(self):
        grid = Grid.centered(65, 8.0)
        points = np.stack(grid.coordinates(), axis=-1)
        inner = np.linalg.norm(points, axis=-1) <= 4.0

        composed = heat_apply(heat_kernel(0.25, H1_BLOCK, points), 0.5, H1_BLOCK, grid)
        direct = heat_kernel(0.75, H1_BLOCK, points)
        self.assertLessEqual(np.max(np.abs(composed - direct)[inner]), 1e-6 * np.max(np.abs(direct)))


class DispersiveTest(MockTestCase):
    def test_flat_block(self):
        report = dispersive_scan(BlockParams(b=(0.0,), r=(1,)), alpha=1.0, n_samples=32)

        self.assertAlmostEqual(report["constant"], 1 / (4 * math.pi))
        self.assertTrue(report["origin_is_sup"])
        self.assertEqual(len(report["rows"]), 32)

    def test_continuous_at_flat_block(self):
        flat = dispersive_scan(BlockParams(b=(0.0,), r=(1,)), alpha=1.0, n_samples=32, seed=5)["constant"]
        flat_pair = dispersive_scan(BlockParams(b=(1.0, 0.0), r=(1, 1)), alpha=1.0, n_samples=32, seed=5)["constant"]

        for b in (1e-1, 1e-2, 1e-3):
            report = dispersive_scan(BlockParams(b=(b,), r=(1,)), alpha=1.0, n_samples=32, seed=5)
            self.assertLessEqual(abs(report["constant"] / flat - 1), 0.01)

            report = dispersive_scan(BlockParams(b=(1.0, b), r=(1, 1)), alpha=1.0, n_samples=32, seed=5)
            self.assertLessEqual(abs(report["constant"] / flat_pair - 1), 0.01)

    def test_rows_are_bounded(self):
        report = dispersive_scan(H1_BLOCK, alpha=0.5 * math.pi, n_samples=64, seed=3)

        self.assertTrue(math.isfinite(report["constant"]))
        for row in report["rows"]:
            self.assertLessEqual(row["sup_value"], row["bound_value"] * (1 + 1e-12))

    def test_seeded(self):
        first = dispersive_scan(H1_BLOCK, alpha=1.0, n_samples=8, seed=9)
        second = dispersive_scan(H1_BLOCK, alpha=1.0, n_samples=8, seed=9)
        self.assertListEqual(first["rows"], second["rows"])

    def test_alpha_limit(self):
        with self.assertRaises(InvalidParameter):
            dispersive_scan(BlockParams(b=(2.0,), r=(1,)), alpha=math.pi / 2, n_samples=8)

    def test_blowup(self):
        rows = dispersive_blowup(H1_BLOCK, n_points=8)
        values = [row["bound_value"] for row in rows]

        self.assertEqual(values, sorted(values))
        self.assertGreater(values[-1], 10 * values[0])


class FejerTest(MockTestCase):
    def test_values(self):
        self.assertAlmostEqual(fejer_pair(5, 5.0), FEJER_AT_CENTER, places=6)
        self.assertAlmostEqual(fejer_pair(5, 5.0 + math.pi), FEJER_AT_PI, places=6)
        self.assertAlmostEqual(fejer_pair(0, 0.009), fejer_pair(0, 0.011), places=6)

    def test_fourier_transform(self):
        self.assertLessEqual(fejer_fourier_check(3), 1e-3)

    def test_damped_floor(self):
        alpha = 1.0
        bound = fejer_pair(0, alpha / 2) * math.exp(-alpha / 2)
        for K in (0, 5, 50, 500):
            self.assertGreaterEqual(damped_fejer_floor(K, alpha), bound - 1e-12)

    def test_damped_is_positive(self):
        lam = np.linspace(0.0, 40.0, 401)
        self.assertTrue(np.all(damped_fejer(10, lam, 0.5) > 0))
