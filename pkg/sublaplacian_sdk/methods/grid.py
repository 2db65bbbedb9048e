import json
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from sublaplacian_sdk.exceptions import ConfigurationError, GridError


@dataclass(frozen=True)
class Grid:
    """
    Centered uniform grid on R^dim with nodes h*(j - (n-1)/2), j = 0..n-1 per axis.
    """

    points: int
    spacing: float
    dim: int

    def __post_init__(self):
        if self.points < 2:
            raise GridError(f"Grid needs at least 2 points per axis. Got {self.points}.")
        if self.spacing <= 0:
            raise GridError(f"Grid spacing should be positive. Got {self.spacing}.")
        if self.dim < 1:
            raise GridError(f"Grid dimension should be positive. Got {self.dim}.")

    @classmethod
    def centered(cls, points: int, half_width: float, dim: int = 2) -> "Grid":
        return cls(points=points, spacing=2.0 * half_width / (points - 1), dim=dim)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points ** self.dim

    @property
    def origin(self) -> float:
        return -self.spacing * (self.points - 1) / 2

    @property
    def half_width(self) -> float:
        return self.spacing * (self.points - 1) / 2

    @property
    def is_odd(self) -> bool:
        return self.points % 2 == 1

    def nodes(self) -> np.ndarray:
        return self.spacing * (np.arange(self.points) - (self.points - 1) / 2)

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.nodes()] * self.dim), indexing="ij")

    def flat_points(self) -> np.ndarray:
        """
        @return: Array (size, dim) of nodes in C order.
        """
        return np.stack([axis.ravel() for axis in self.coordinates()], axis=-1)

    def weights(self) -> np.ndarray:
        """
        @return: Trapezoid quadrature weights with the grid shape.
        """
        line = np.full(self.points, self.spacing)
        line[[0, -1]] *= 0.5

        result = line
        for _ in range(self.dim - 1):
            result = np.multiply.outer(result, line)

        return result

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.sum(np.conj(f) * g * self.weights()))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(f) ** 2 * self.weights())))

    def check(self, f: np.ndarray, name: str = "f") -> np.ndarray:
        f = np.asarray(f)
        if f.shape != self.shape:
            raise GridError(f"`{name}` should have shape {self.shape}. Got {f.shape}.")
        return f


def save_grid_function(path: str, values: np.ndarray, grid: Grid) -> None:
    """
    Writes flat little-endian complex128 samples to `path` and a JSON sidecar to `path`.json.
    """
    values = grid.check(values, "values")
    np.ascontiguousarray(values, dtype="<c16").tofile(path)

    with open(path + ".json", "w", encoding="utf-8") as file:
        json.dump(
            {
                "shape": list(grid.shape),
                "spacing": grid.spacing,
                "origin": [grid.origin] * grid.dim,
                "dtype": "complex128",
            },
            file,
            indent=2,
            sort_keys=True,
        )


def load_grid_function(path: str) -> Tuple[np.ndarray, Grid]:
    try:
        with open(path + ".json", encoding="utf-8") as file:
            meta = json.load(file)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigurationError(f"Can not read grid sidecar for `{path}`: {error}")

    shape = tuple(meta["shape"])
    if len(set(shape)) != 1:
        raise GridError(f"Only square grids are supported. Got shape {shape}.")

    grid = Grid(points=shape[0], spacing=float(meta["spacing"]), dim=len(shape))
    values = np.fromfile(path, dtype="<c16")

    if values.size != grid.size:
        raise GridError(
            f"Grid file `{path}` holds {values.size} samples, sidecar expects {grid.size}."
        )

    return values.reshape(shape), grid
