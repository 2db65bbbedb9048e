from unittest import TestCase

import numpy as np
import pytest

from sublaplacian_sdk.methods.grid import Grid


class MockTestCase(TestCase):
    @pytest.fixture(autouse=True)
    def __inject_fixtures(self, mocker, tmp_path):
        self.mocker = mocker
        self.tmp_path = tmp_path

    def assertRelativeClose(self, actual, expected, tol: float):
        error = np.linalg.norm(np.asarray(actual) - np.asarray(expected))
        scale = np.linalg.norm(np.asarray(expected))
        self.assertLessEqual(error, tol * scale, f"relative error {error / scale:.3e} above {tol}")


def gaussian(grid: Grid, center=(0.0, 0.0), width: float = 1.0) -> np.ndarray:
    coordinates = grid.coordinates()
    radius2 = sum((x - c) ** 2 for x, c in zip(coordinates, center))
    return np.exp(-radius2 / (2 * width ** 2))
