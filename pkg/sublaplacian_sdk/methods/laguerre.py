import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import binom, comb, eval_hermite, gammaln, xlogy

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import (
    DimensionMismatch,
    GridError,
    InvalidParameter,
    QuadratureError,
)
from sublaplacian_sdk.group.presets import standard_symplectic
from sublaplacian_sdk.methods.grid import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockParams:
    """
    Type (b, r) of an anisotropic twisted Laplacian plus the radical dimension r0.

    Coordinates are laid out as the radical first, then per block (x_1..x_r, y_1..y_r).
    """

    b: Tuple[float, ...]
    r: Tuple[int, ...]
    r0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(b_n) for b_n in self.b))
        object.__setattr__(self, "r", tuple(int(r_n) for r_n in self.r))

        if len(self.b) != len(self.r):
            raise DimensionMismatch(
                f"`b` and `r` should have equal length. Got {len(self.b)} and {len(self.r)}."
            )
        if any(b_n < 0 for b_n in self.b):
            raise InvalidParameter(f"Frequencies should be nonnegative. Got {self.b}.")
        if any(r_n < 1 for r_n in self.r):
            raise InvalidParameter(f"Multiplicities should be positive. Got {self.r}.")
        if self.r0 < 0:
            raise InvalidParameter(f"`r0` should be nonnegative. Got {self.r0}.")

    @property
    def n_blocks(self) -> int:
        return len(self.b)

    @property
    def total_r(self) -> int:
        return sum(self.r)

    @property
    def d1(self) -> int:
        return self.r0 + 2 * self.total_r

    @property
    def positive(self) -> bool:
        return all(b_n > 0 for b_n in self.b)

    def require_positive(self):
        if not self.positive:
            raise InvalidParameter(f"Frequencies should be positive here. Got {self.b}.")

    def require_twisted(self):
        if self.r0 != 0:
            raise InvalidParameter(f"Only the twisted part is supported here, `r0` should be 0. Got {self.r0}.")

    def scaled(self, s: float) -> "BlockParams":
        return BlockParams(b=tuple(s * b_n for b_n in self.b), r=self.r, r0=self.r0)

    def block_offsets(self) -> List[int]:
        offsets = []
        offset = self.r0
        for r_n in self.r:
            offsets.append(offset)
            offset += 2 * r_n
        return offsets

    def twist_matrix(self) -> np.ndarray:
        """
        @return: J_b = diag(0_{r0}, b_1 J_std, .., b_N J_std), so that E(y, z) = exp(i/2 <J_b y, z>).
        """
        matrix = np.zeros((self.d1, self.d1))
        for offset, b_n, r_n in zip(self.block_offsets(), self.b, self.r):
            matrix[offset : offset + 2 * r_n, offset : offset + 2 * r_n] = b_n * standard_symplectic(r_n)
        return matrix


@dataclass(frozen=True, order=True)
class LatticePoint:
    k: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(k_n) for k_n in self.k))
        if any(k_n < 0 for k_n in self.k):
            raise InvalidParameter(f"Lattice indexes should be nonnegative. Got {self.k}.")


def _as_point(k: Union[LatticePoint, Sequence[int]]) -> LatticePoint:
    return k if isinstance(k, LatticePoint) else LatticePoint(tuple(k))


def laguerre_poly(k: int, alpha: int, x):
    """
    Generalized Laguerre polynomial L_k^alpha(x) by the three term recurrence.
    """
    x = np.asarray(x, dtype=float)

    if k == 0:
        return np.ones_like(x)[()]

    previous = np.ones_like(x)
    current = 1.0 + alpha - x
    for n in range(2, k + 1):
        previous, current = current, ((2 * n - 1 + alpha - x) * current - (n - 1 + alpha) * previous) / n

    # L_k^alpha(0) = binom(k + alpha, k)
    current = np.where(x == 0, binom(k + alpha, k), current)
    return current[()]


def laguerre_sequence(kmax: int, alpha: int, x) -> np.ndarray:
    """
    @return: Array (kmax + 1,) + shape(x) with L_0^alpha(x) .. L_kmax^alpha(x).
    """
    x = np.asarray(x, dtype=float)
    result = np.empty((kmax + 1,) + x.shape)
    result[0] = 1.0

    if kmax >= 1:
        result[1] = 1.0 + alpha - x
    for n in range(2, kmax + 1):
        result[n] = ((2 * n - 1 + alpha - x) * result[n - 1] - (n - 1 + alpha) * result[n - 2]) / n

    return result


def _phi_radial(k: int, lam: float, m: int, rho2) -> np.ndarray:
    rho2 = np.asarray(rho2, dtype=float)
    return lam ** m * laguerre_poly(k, m - 1, 0.5 * lam * rho2) * np.exp(-0.25 * lam * rho2)


def phi(k: int, lam: float, m: int, z) -> np.ndarray:
    """
    Rescaled Laguerre function lam^m L_k^{m-1}(lam |z|^2 / 2) exp(-lam |z|^2 / 4).

    @param z: Point(s) with last axis of length 2m
    """
    if lam <= 0:
        raise InvalidParameter(f"`lambda` should be positive. Got {lam}.")

    z = np.asarray(z, dtype=float)
    if z.shape[-1] != 2 * m:
        raise DimensionMismatch(f"`z` should have last axis {2 * m}. Got shape {z.shape}.")

    return _phi_radial(k, lam, m, np.sum(z ** 2, axis=-1))


def eigenvalue(k: Union[LatticePoint, Sequence[int]], p: BlockParams) -> float:
    """
    @return: lambda_k = sum_n (2 k_n + r_n) b_n
    """
    k = _as_point(k)
    if len(k.k) != p.n_blocks:
        raise DimensionMismatch(f"Lattice point should have {p.n_blocks} entries. Got {len(k.k)}.")

    return float(sum((2 * k_n + r_n) * b_n for k_n, r_n, b_n in zip(k.k, p.r, p.b)))


def diagonal_weight(k: Union[LatticePoint, Sequence[int]], p: BlockParams) -> float:
    """
    @return: prod_n b_n^{r_n} binom(k_n + r_n - 1, k_n), the level k kernel on the diagonal without c
    """
    k = _as_point(k)
    weight = 1.0
    for k_n, b_n, r_n in zip(k.k, p.b, p.r):
        weight *= b_n ** r_n * comb(k_n + r_n - 1, k_n, exact=True)
    return weight


def enumerate_lattice(p: BlockParams, window: Tuple[float, float]) -> List[LatticePoint]:
    """
    All k with lambda_k in the half-open window [lo, hi), in lexicographic order.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo < 0 or lo >= hi:
        raise InvalidParameter(f"Window should satisfy 0 <= lo < hi < inf. Got [{lo}, {hi}).")

    if p.n_blocks == 0:
        return []
    p.require_positive()

    base = sum(r_n * b_n for r_n, b_n in zip(p.r, p.b))
    if base >= hi:
        return []

    *heads, (_, last_b) = list(zip(p.r, p.b))
    head_ranges = [range(int((hi - base) // (2 * b_n)) + 1) for _, b_n in heads]

    members = []
    for head in itertools.product(*head_ranges):
        partial = base + sum(2 * k_n * b_n for k_n, (_, b_n) in zip(head, heads))
        if partial >= hi:
            continue

        first = max(0, int(math.floor((lo - partial) / (2 * last_b))) - 1)
        last = int(math.ceil((hi - partial) / (2 * last_b))) + 1
        for k_last in range(first, last + 1):
            point = LatticePoint(head + (k_last,))
            value = eigenvalue(point, p)
            if lo <= value < hi:
                members.append(point)

    return members


def projection_normalization(p: BlockParams) -> float:
    """
    @return: c = (2 pi)^{-|r|}, the constant making f -> f x (c phi_k) idempotent.
    """
    return (2 * np.pi) ** (-p.total_r)


def twist_phase(p: BlockParams, x, y) -> np.ndarray:
    """
    @return: E^{b,r}(x, y) = exp(i/2 sum_n b_n omega_std(x^(n), y^(n)))
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(0.5j * np.sum((x @ p.twist_matrix().T) * y, axis=-1))


@dataclass(frozen=True)
class TwistedKernel:
    """
    Kernel c * prod_n phi_{k_n}^{(b_n, r_n)}(x^(n) - y^(n)) * E^{b,r}(x, y) of the projection P_k.
    """

    k: LatticePoint
    params: BlockParams
    c: float

    def profile(self, v) -> np.ndarray:
        """
        @return: c * prod_n phi_{k_n}(v^(n)), the twisted convolution kernel at offset v.
        """
        v = np.asarray(v, dtype=float)
        result = np.full(v.shape[:-1], self.c)
        for offset, k_n, b_n, r_n in zip(self.params.block_offsets(), self.k.k, self.params.b, self.params.r):
            result = result * phi(k_n, b_n, r_n, v[..., offset : offset + 2 * r_n])
        return result

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.profile(x - y) * twist_phase(self.params, x, y)

    def diagonal(self) -> float:
        """
        @return: K(x, x) = c * prod_n b_n^{r_n} binom(k_n + r_n - 1, k_n)
        """
        return self.c * diagonal_weight(self.k, self.params)


def projection_kernel(
    k: Union[LatticePoint, Sequence[int]], p: BlockParams, c: float = None
) -> TwistedKernel:
    p.require_twisted()
    p.require_positive()

    k = _as_point(k)
    if len(k.k) != p.n_blocks:
        raise DimensionMismatch(f"Lattice point should have {p.n_blocks} entries. Got {len(k.k)}.")

    return TwistedKernel(k=k, params=p, c=projection_normalization(p) if c is None else c)


def _boundary_max(f: np.ndarray) -> float:
    edge = 0.0
    for axis in range(f.ndim):
        edge = max(
            edge,
            float(np.max(np.abs(np.take(f, 0, axis=axis)))),
            float(np.max(np.abs(np.take(f, -1, axis=axis)))),
        )
    return edge


def _check_decay(f: np.ndarray, name: str) -> bool:
    peak = float(np.max(np.abs(f), initial=0.0))
    if peak == 0:
        return True

    edge = _boundary_max(f)
    if edge > config.BOUNDARY_DECAY_TOL * peak:
        logger.warning(
            "`%s` does not decay at the grid boundary (edge/peak = %.3e)", name, edge / peak
        )
        return False
    return True


Kernel = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def twisted_convolution(
    f: np.ndarray,
    g: Kernel,
    p: BlockParams,
    grid: Grid,
    kernel_radius: Optional[float] = None,
) -> np.ndarray:
    """
    Trapezoid quadrature of (f x g)(y) = int f(z) g(y - z) E^{b,r}(y, z) dz at every grid node y.

    @param f: Grid function
    @param g: Grid function on an odd grid (origin is the central node) or a callable on offset vectors (..., d1)
    @param p: Block parameters, r0 should be 0
    @param grid: Common uniform grid
    @param kernel_radius: Skip offsets longer than this
    @return: Grid function
    """
    p.require_twisted()
    if grid.dim != p.d1:
        raise DimensionMismatch(f"Grid dimension should be {p.d1}. Got {grid.dim}.")

    f = grid.check(f).astype(complex)
    _check_decay(f, "f")

    n, h = grid.points, grid.spacing
    span = np.arange(-(n - 1), n)
    offsets = np.array(list(itertools.product(span, repeat=grid.dim)))

    if kernel_radius is not None:
        offsets = offsets[np.linalg.norm(offsets * h, axis=1) <= kernel_radius]

    if callable(g):
        values = np.asarray(g(offsets * h), dtype=complex)
    else:
        g = grid.check(g, "g")
        if not grid.is_odd:
            raise GridError("Sampled kernels need an odd point count so that the origin is a node.")
        _check_decay(g, "g")

        center = (n - 1) // 2
        inside = np.all(np.abs(offsets) <= center, axis=1)
        offsets = offsets[inside]
        values = g[tuple((offsets + center).T)].astype(complex)

    keep = values != 0
    offsets, values = offsets[keep], values[keep]

    weighted = f * grid.weights()
    nodes = grid.nodes()
    twist_t = p.twist_matrix().T
    result = np.zeros(grid.shape, dtype=complex)

    for offset, value in zip(offsets, values):
        # E(y, y - v) = exp(-i/2 <y, J_b^T v>), separable over axes
        frequency = twist_t @ (offset * h)
        phase = np.ones((1,) * grid.dim, dtype=complex)
        for axis in range(grid.dim):
            shape = [1] * grid.dim
            shape[axis] = n
            phase = phase * np.exp(-0.5j * frequency[axis] * nodes).reshape(shape)

        destination = tuple(slice(max(o, 0), n + min(o, 0)) for o in offset)
        source = tuple(slice(max(-o, 0), n + min(-o, 0)) for o in offset)
        result[destination] += value * weighted[source] * phase[destination]

    return result


def apply_twisted_laplacian(f: np.ndarray, p: BlockParams, grid: Grid) -> np.ndarray:
    """
    -Laplacian + b_n^2 |z|^2 / 4 - i b_n <J_std z, grad> blockwise, by central differences with zero padding.
    """
    p.require_twisted()
    if grid.spacing > config.LAPLACIAN_MAX_SPACING:
        raise GridError(
            f"Grid spacing should be at most {config.LAPLACIAN_MAX_SPACING}. Got {grid.spacing}."
        )
    if grid.dim != p.d1:
        raise DimensionMismatch(f"Grid dimension should be {p.d1}. Got {grid.dim}.")

    f = grid.check(f).astype(complex)
    h = grid.spacing
    padded = np.pad(f, 1)
    inner = tuple([slice(1, -1)] * grid.dim)
    coordinates = grid.coordinates()

    def shifted(axis: int, step: int) -> np.ndarray:
        index = list(inner)
        index[axis] = slice(1 + step, grid.points + 1 + step)
        return padded[tuple(index)]

    laplacian = np.zeros_like(f)
    gradient = []
    for axis in range(grid.dim):
        forward, backward = shifted(axis, 1), shifted(axis, -1)
        laplacian += (forward - 2 * f + backward) / h ** 2
        gradient.append((forward - backward) / (2 * h))

    result = -laplacian
    for offset, b_n, r_n in zip(p.block_offsets(), p.b, p.r):
        for j in range(r_n):
            x_axis, y_axis = offset + j, offset + r_n + j
            x, y = coordinates[x_axis], coordinates[y_axis]
            result += 0.25 * b_n ** 2 * (x ** 2 + y ** 2) * f
            result -= 1j * b_n * (-y * gradient[x_axis] + x * gradient[y_axis])

    return result


def _hermite_function(nu: int, t: np.ndarray) -> np.ndarray:
    """
    Hermite polynomial part H_nu(t) / sqrt(2^nu nu! sqrt(pi)) of the normalized Hermite function.
    """
    log_norm = 0.5 * (nu * np.log(2.0) + gammaln(nu + 1) + 0.5 * np.log(np.pi))
    return eval_hermite(nu, t) * np.exp(-log_norm)


def special_hermite(alpha: Sequence[int], beta: Sequence[int], lam: float, z, order: int = None) -> complex:
    """
    Special Hermite function (2 pi)^{-m/2} lam^{m/2} (pi_lam(z, 0) Phi_alpha, Phi_beta) by Gauss-Hermite quadrature.

    @param alpha: Multi-index of length m
    @param beta: Multi-index of length m
    @param lam: Positive scale
    @param z: Point (x_1..x_m, y_1..y_m)
    @param order: Quadrature order, at least |alpha| + |beta| + 16
    """
    if lam <= 0:
        raise InvalidParameter(f"`lambda` should be positive. Got {lam}.")

    m = len(alpha)
    if len(beta) != m:
        raise DimensionMismatch(f"Multi-indexes should have equal length. Got {len(alpha)} and {len(beta)}.")

    z = np.asarray(z, dtype=float)
    if z.shape != (2 * m,):
        raise DimensionMismatch(f"`z` should have length {2 * m}. Got shape {z.shape}.")

    minimal = sum(alpha) + sum(beta) + 16
    order = minimal if order is None else order
    if order < minimal:
        raise QuadratureError(f"Quadrature order should be at least {minimal}. Got {order}.")

    nodes, weights = hermgauss(order)
    root = np.sqrt(lam)
    value = complex((2 * np.pi) ** (-m / 2) * lam ** (m / 2))

    for j in range(m):
        x, y = z[j], z[m + j]
        s = root * y
        integrand = (
            np.exp(1j * root * x * (nodes - 0.5 * s))
            * _hermite_function(alpha[j], nodes + 0.5 * s)
            * _hermite_function(beta[j], nodes - 0.5 * s)
        )
        value *= np.exp(0.5j * lam * x * y - 0.25 * s ** 2) * np.sum(weights * integrand)

    return value


def _landau_function(n: int, m: int, b: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    L2-normalized e^{i m theta} (sqrt(b) rho)^{|m|} L_n^{|m|}(b rho^2 / 2) e^{-b rho^2 / 4},
    eigenfunction of the b-twisted Laplacian on R^2 with eigenvalue b (2n + |m| + m + 1).
    """
    s = 0.5 * b * (x ** 2 + y ** 2)
    order = abs(m)
    log_amplitude = 0.5 * xlogy(order, s) - 0.5 * s + 0.5 * (gammaln(n + 1) - gammaln(n + order + 1))
    angular = np.exp(1j * m * np.arctan2(y, x))
    return angular * np.exp(log_amplitude) * laguerre_poly(n, order, s) * np.sqrt(b / (2 * np.pi))


def _level_modes(level: int) -> Tuple[List[Tuple[int, int]], int]:
    """
    @return: Finite modes (n, m >= 0) of a level and the n shared by all its m < 0 modes.
    """
    return [(level - m, m) for m in range(level + 1)], level


def eigenfunction_basis(
    members: Sequence[Union[LatticePoint, Sequence[int]]],
    p: BlockParams,
    grid: Grid,
    rotation: np.ndarray = None,
) -> Tuple[List[LatticePoint], np.ndarray]:
    """
    Grid samples of closed-form orthonormal eigenfunctions spanning the eigenspaces of `members`.

    Each complex coordinate (x_j, y_j) of a block carries a Landau level; modes with m < 0 are
    infinitely many, so a mode is kept only if at least 1 - config.BASIS_MASS_TOL of its mass
    lies on the grid.

    @param rotation: Optional orthogonal matrix, functions are evaluated at y = rotation^T x
    @return: Lattice point of every column and the array (grid.size, M) of samples.
    """
    p.require_twisted()
    p.require_positive()
    if grid.dim != p.d1:
        raise DimensionMismatch(f"Grid dimension should be {p.d1}. Got {grid.dim}.")

    points = grid.flat_points()
    if rotation is not None:
        points = points @ rotation
    weights = grid.weights().ravel()

    def mass(values: np.ndarray) -> float:
        return float(np.sum(np.abs(values) ** 2 * weights))

    labels, columns = [], []
    for member in members:
        member = _as_point(member)
        block_factors = []

        for offset, k_n, b_n, r_n in zip(p.block_offsets(), member.k, p.b, p.r):
            factors = []
            for levels in _compositions(k_n, r_n):
                pair_modes = []
                for j, level in enumerate(levels):
                    x = points[:, offset + j]
                    y = points[:, offset + r_n + j]
                    modes = []
                    finite, negative_n = _level_modes(level)
                    for n, m in finite:
                        values = _landau_function(n, m, b_n, x, y)
                        if mass(values) >= 1 - config.BASIS_MASS_TOL:
                            modes.append(values)
                    m = -1
                    while True:
                        values = _landau_function(negative_n, m, b_n, x, y)
                        if mass(values) < 1 - config.BASIS_MASS_TOL:
                            break
                        modes.append(values)
                        m -= 1
                    pair_modes.append(modes)

                for combination in itertools.product(*pair_modes):
                    factors.append(np.prod(np.stack(combination), axis=0))
            block_factors.append(factors)

        for combination in itertools.product(*block_factors):
            labels.append(member)
            columns.append(np.prod(np.stack(combination), axis=0))

    if not columns:
        return [], np.zeros((grid.size, 0), dtype=complex)

    return labels, np.stack(columns, axis=1)


def _compositions(total: int, parts: int):
    """
    Yields all tuples of `parts` nonnegative integers summing to `total`.
    """
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
