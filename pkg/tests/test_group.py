import json
from fractions import Fraction

import numpy as np

from sublaplacian_sdk.exceptions import ConfigurationError, DimensionMismatch, InvalidParameter
from sublaplacian_sdk.group import GroupClass, GroupSpec, preset
from sublaplacian_sdk.methods import (
    bracket,
    classify,
    j_of_mu,
    load_group,
    stein_tomas_exponent,
    theta_interpolation,
    validate,
)
from tests.fixtures import DEPENDENT_GROUP, FREE_N32_J_E3, INLINE_H1, NON_SKEW_GROUP
from tests.utils import MockTestCase


class GroupSpecTest(MockTestCase):
    def test_presets(self):
        self.assertEqual(preset("heisenberg:1").d1, 2)
        self.assertEqual(preset("heisenberg:3").d1, 6)
        self.assertEqual(preset("htype-quaternion").d2, 3)
        self.assertEqual(preset("metivier-aniso").label, "metivier-aniso:1,3")
        self.assertEqual(preset("free-n32").structure.shape, (3, 3, 3))

    def test_unknown_preset(self):
        with self.assertRaises(ConfigurationError):
            preset("heisenberg-like")

        with self.assertRaises(ConfigurationError):
            preset("heisenberg:x")

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            GroupSpec(d1=3, d2=1, structure=np.zeros((1, 2, 2)))

    def test_from_dict(self):
        spec = GroupSpec.from_dict(INLINE_H1)
        self.assertEqual(spec.label, "inline-h1")
        self.assertFalse(spec.preset)

        data = spec.to_dict()
        self.assertDictEqual(load_group(data).to_dict(), data)

        with self.assertRaises(ConfigurationError):
            GroupSpec.from_dict({"d1": 2, "d2": 1})

    def test_load_group_file(self):
        path = self.tmp_path / "group.json"
        path.write_text(json.dumps(INLINE_H1))
        self.assertEqual(load_group(str(path)).d1, 2)

        broken = self.tmp_path / "broken.json"
        broken.write_text('{"d1": 2,\n "d2": }')
        with self.assertRaises(ConfigurationError) as context:
            load_group(str(broken))
        self.assertIn("line 2", str(context.exception))


class StructureTest(MockTestCase):
    def test_j_of_mu(self):
        np.testing.assert_array_equal(j_of_mu(preset("heisenberg:1"), [1.0]), [[0, -1], [1, 0]])
        np.testing.assert_array_equal(j_of_mu(preset("heisenberg:1"), [0.0]), np.zeros((2, 2)))
        np.testing.assert_array_equal(j_of_mu(preset("free-n32"), [0, 0, 1]), FREE_N32_J_E3)

    def test_j_of_mu_linear(self):
        spec = preset("htype-quaternion")
        rng = np.random.default_rng(7)
        mu, nu = rng.standard_normal(3), rng.standard_normal(3)

        np.testing.assert_allclose(
            j_of_mu(spec, 2 * mu - nu), 2 * j_of_mu(spec, mu) - j_of_mu(spec, nu), atol=1e-14
        )

    def test_j_of_mu_dimension(self):
        with self.assertRaises(DimensionMismatch):
            j_of_mu(preset("free-n32"), [1.0, 0.0])

    def test_bracket(self):
        spec = preset("heisenberg:1")
        np.testing.assert_allclose(bracket(spec, [1, 0], [0, 1]), [1.0])
        np.testing.assert_allclose(bracket(spec, [0, 1], [1, 0]), [-1.0])

    def test_validate(self):
        report = validate(preset("free-n32"))
        self.assertTrue(report["passed"])
        self.assertEqual(report["rank"], 3)
        self.assertEqual(report["skew_residual"], 0)

        report = validate(GroupSpec.from_dict(NON_SKEW_GROUP))
        self.assertFalse(report["passed"])
        self.assertIn("skew", report["errors"][0])

        report = validate(GroupSpec.from_dict(DEPENDENT_GROUP))
        self.assertFalse(report["passed"])
        self.assertEqual(report["rank"], 1)


class ClassifyTest(MockTestCase):
    def test_presets(self):
        self.assertEqual(classify(preset("heisenberg:1"))["group_class"], GroupClass.HeisenbergType)
        self.assertEqual(classify(preset("htype-quaternion"))["group_class"], GroupClass.HeisenbergType)
        self.assertEqual(classify(preset("metivier-aniso:1,3"))["group_class"], GroupClass.Metivier)
        self.assertEqual(classify(preset("free-n32"))["group_class"], GroupClass.General)

    def test_classes_are_ordered(self):
        self.assertGreater(GroupClass.HeisenbergType, GroupClass.Metivier)
        self.assertGreater(GroupClass.Metivier, GroupClass.General)

    def test_inline_group_is_probabilistic(self):
        with self.assertLogs("sublaplacian_sdk.methods.group", level="WARNING"):
            report = classify(GroupSpec.from_dict(INLINE_H1), samples=4, seed=1)

        self.assertTrue(report["probabilistic"])
        self.assertEqual(len(report["directions"]), 4)
        self.assertFalse(classify(preset("heisenberg:1"))["probabilistic"])

    def test_seeded(self):
        first = classify(preset("free-n32"), seed=3)
        second = classify(preset("free-n32"), seed=3)
        self.assertListEqual(first["directions"], second["directions"])

    def test_stable_across_seeds(self):
        expected = {
            "heisenberg:1": GroupClass.HeisenbergType,
            "htype-quaternion": GroupClass.HeisenbergType,
            "metivier-aniso:1,3": GroupClass.Metivier,
            "free-n32": GroupClass.General,
        }
        for name, group_class in expected.items():
            for seed in range(10):
                self.assertEqual(classify(preset(name), seed=seed)["group_class"], group_class, (name, seed))

        inline = GroupSpec.from_dict(INLINE_H1)
        for seed in range(10):
            self.assertEqual(classify(inline, samples=8, seed=seed)["group_class"], GroupClass.HeisenbergType)


class ExponentTest(MockTestCase):
    def test_stein_tomas(self):
        self.assertEqual(stein_tomas_exponent(1), 1)
        self.assertEqual(stein_tomas_exponent(2), Fraction(6, 5))
        self.assertEqual(stein_tomas_exponent(3), Fraction(4, 3))

        with self.assertRaises(InvalidParameter):
            stein_tomas_exponent(0)

    def test_theta(self):
        self.assertEqual(theta_interpolation(1, Fraction(6, 5)), 0)
        self.assertEqual(theta_interpolation(Fraction(6, 5), Fraction(6, 5)), 1)
        self.assertEqual(theta_interpolation(Fraction(12, 11), Fraction(6, 5)), Fraction(1, 2))
        self.assertEqual(theta_interpolation(1, 1), 1)

    def test_theta_range(self):
        with self.assertRaises(InvalidParameter):
            theta_interpolation(Fraction(4, 3), Fraction(6, 5))

        with self.assertRaises(InvalidParameter):
            theta_interpolation(1, 3)
