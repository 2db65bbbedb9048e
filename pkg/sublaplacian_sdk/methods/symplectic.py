import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import (
    DecompositionError,
    DimensionMismatch,
    GridError,
    InvalidParameter,
)
from sublaplacian_sdk.group.presets import standard_symplectic
from sublaplacian_sdk.group.type import GroupSpec
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.group import j_of_mu
from sublaplacian_sdk.methods.laguerre import BlockParams
from sublaplacian_sdk.methods.pool import pool_map
from sublaplacian_sdk.methods.typing import DecompositionResiduals, HomogeneityReport

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class MuDecomposition:
    """
    Spectral data of J_mu: frequencies b (strictly decreasing), multiplicities r, radical
    dimension r0, projections P_0..P_N and the rotation R whose columns are the radical basis
    followed by the symplectic block bases.
    """

    mu: np.ndarray
    b: np.ndarray
    r: Tuple[int, ...]
    r0: int
    projections: List[np.ndarray]
    rotation: np.ndarray
    cluster_tol: float
    j_mu: np.ndarray = field(repr=False)

    @property
    def signature(self) -> Tuple[int, Tuple[int, ...], int]:
        return len(self.r), self.r, self.r0

    @property
    def d1(self) -> int:
        return self.rotation.shape[0]

    @property
    def block_params(self) -> BlockParams:
        return BlockParams(b=tuple(self.b.tolist()), r=self.r, r0=self.r0)

    def block_bases(self) -> List[np.ndarray]:
        bases = []
        offset = self.r0
        for r_n in self.r:
            bases.append(self.rotation[:, offset : offset + 2 * r_n])
            offset += 2 * r_n
        return bases

    def coordinate_projection(self, index: int) -> np.ndarray:
        """
        @param index: 0 for the radical, n for the n-th block
        @return: Diagonal projection onto the coordinates of that block.
        """
        sizes = [self.r0] + [2 * r_n for r_n in self.r]
        start = sum(sizes[:index])
        diagonal = np.zeros(self.d1)
        diagonal[start : start + sizes[index]] = 1.0
        return np.diag(diagonal)

    def residuals(self) -> DecompositionResiduals:
        identity = np.eye(self.d1)
        norm = lambda matrix: float(np.linalg.norm(matrix, 2)) if matrix.size else 0.0

        spectral = -self.j_mu @ self.j_mu
        for b_n, projection in zip(self.b, self.projections[1:]):
            spectral = spectral - b_n ** 2 * projection

        traces = [abs(np.trace(self.projections[0]) - self.r0)] + [
            abs(np.trace(projection) - 2 * r_n)
            for r_n, projection in zip(self.r, self.projections[1:])
        ]

        orthogonality = 0.0
        for n, first in enumerate(self.projections):
            for second in self.projections[n + 1 :]:
                orthogonality = max(orthogonality, norm(first @ second))

        symplectic = 0.0
        for b_n, r_n, basis in zip(self.b, self.r, self.block_bases()):
            symplectic = max(
                symplectic,
                norm(basis.T @ self.j_mu @ basis - b_n * standard_symplectic(r_n)),
            )

        return DecompositionResiduals(
            spectral=norm(spectral),
            idempotency=max(norm(p @ p - p) for p in self.projections),
            trace=float(max(traces)),
            orthogonality=orthogonality,
            completeness=norm(sum(self.projections) - identity),
            rotation=norm(self.rotation.T @ self.rotation - identity),
            commutation=max(
                norm(p @ self.rotation - self.rotation @ self.coordinate_projection(n))
                for n, p in enumerate(self.projections)
            ),
            symplectic=symplectic,
        )

    def max_residual(self) -> float:
        return max(self.residuals().values())

    def to_dict(self, matrices: bool = False) -> Dict[str, Any]:
        result = {
            "mu": self.mu.tolist(),
            "b": self.b.tolist(),
            "r": list(self.r),
            "r0": self.r0,
            "cluster_tol": self.cluster_tol,
            "residuals": dict(self.residuals()),
        }

        if matrices:
            result["projections"] = [p.tolist() for p in self.projections]
            result["rotation"] = self.rotation.tolist()

        return result


def _cluster_spectrum(values: np.ndarray, cluster_tol: float) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Splits ascending eigenvalues of -J^2 into the radical and groups of equal frequency.

    @return: Radical indexes and groups of indexes ordered by decreasing value.
    """
    threshold = cluster_tol ** 2 * max(1.0, float(values[-1]))
    radical = np.flatnonzero(values < threshold)
    rest = np.flatnonzero(values >= threshold)

    groups = []
    current = []
    for index in rest:
        if current and (values[index] - values[current[-1]]) >= cluster_tol * values[index]:
            groups.append(np.array(current))
            current = []
        current.append(index)
    if current:
        groups.append(np.array(current))

    return radical, groups[::-1]


def _block_basis(j_group: np.ndarray, b_n: float, r_n: int) -> Tuple[np.ndarray, float]:
    """
    Real basis [a_1..a_r, c_1..c_r] of one frequency group in subspace coordinates with
    basis^T J basis = b_n * J_std.
    """
    size = j_group.shape[0]
    positive = 0.5 * (np.eye(size) + 1j * j_group / b_n)

    q, _, _ = scipy.linalg.qr(positive, mode="economic", pivoting=True)
    w = q[:, :r_n]

    target = b_n * standard_symplectic(r_n)
    best_residual = np.inf
    best_basis = None

    real, imag = np.sqrt(2) * w.real, np.sqrt(2) * w.imag
    for first, second in ((real, imag), (imag, real)):
        basis = np.hstack([first, second])
        residual = float(np.max(np.abs(basis.T @ j_group @ basis - target)))
        if residual < best_residual:
            best_residual, best_basis = residual, basis

    return best_basis, best_residual


def _radical_basis(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return vectors

    # Built from the kernel projection so the eigensolver's basis choice does not leak through.
    # Sorted by dominant coordinate, dominant entry positive.
    projection = vectors @ vectors.T
    _, _, pivots = scipy.linalg.qr(projection, pivoting=True)
    columns = projection[:, np.sort(pivots[: vectors.shape[1]])]
    basis, _ = np.linalg.qr(columns)

    dominant = np.argmax(np.abs(basis), axis=0)
    basis = basis[:, np.argsort(dominant, kind="stable")]
    signs = np.sign(basis[np.argmax(np.abs(basis), axis=0), np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0

    return basis * signs


def decompose(spec: GroupSpec, mu, cluster_tol: float = None) -> MuDecomposition:
    """
    Symplectic spectral decomposition of J_mu.

    @param spec: Group spec
    @param mu: Nonzero covector of length d2
    @param cluster_tol: Relative eigenvalue clustering tolerance, config.CLUSTER_TOL if not provided
    @return: MuDecomposition
    """
    cluster_tol = config.CLUSTER_TOL if cluster_tol is None else cluster_tol
    if cluster_tol <= 0:
        raise InvalidParameter(f"`cluster_tol` should be positive. Got {cluster_tol}.")

    mu = np.asarray(mu, dtype=float)
    if mu.shape != (spec.d2,):
        raise DimensionMismatch(f"`mu` should have length {spec.d2}. Got shape {mu.shape}.")
    if not np.any(mu):
        raise InvalidParameter("`mu` should be nonzero.")

    j_mu = j_of_mu(spec, mu)
    s = -j_mu @ j_mu
    values, vectors = np.linalg.eigh(0.5 * (s + s.T))

    radical, groups = _cluster_spectrum(values, cluster_tol)

    b, r, bases, projections = [], [], [], []
    for group in groups:
        if len(group) % 2:
            raise DecompositionError(
                f"Eigenvalue cluster of odd dimension {len(group)} in spectrum {values.tolist()} "
                f"(cluster_tol={cluster_tol})"
            )

        b_n = float(np.sqrt(np.mean(values[group])))
        r_n = len(group) // 2
        subspace = vectors[:, group]

        basis, residual = _block_basis(subspace.T @ j_mu @ subspace, b_n, r_n)
        if residual > config.DECOMPOSE_RESIDUAL_TOL * max(1.0, b_n):
            raise DecompositionError(
                f"Symplectic normalization failed for b={b_n:.6g} with residual {residual:.3e}"
            )

        block = subspace @ basis
        b.append(b_n)
        r.append(r_n)
        bases.append(block)
        projections.append(block @ block.T)

    kernel = _radical_basis(vectors[:, radical])
    rotation = np.hstack([kernel] + bases)

    return MuDecomposition(
        mu=mu,
        b=np.array(b),
        r=tuple(r),
        r0=len(radical),
        projections=[kernel @ kernel.T] + projections,
        rotation=rotation,
        cluster_tol=cluster_tol,
        j_mu=j_mu,
    )


def decompose_many(
    spec: GroupSpec, mus: Sequence, cluster_tol: float = None
) -> List[MuDecomposition]:
    """
    Decomposes many covectors on the worker pool, results keep the order of `mus`.
    """
    return pool_map(lambda mu: decompose(spec, mu, cluster_tol), list(mus))


def check_homogeneity(
    spec: GroupSpec, mu, s: float, cluster_tol: float = None
) -> HomogeneityReport:
    """
    Checks b^{s mu} = s b^mu and P_n^{s mu} = P_n^mu.
    """
    if s <= 0:
        raise InvalidParameter(f"`s` should be positive. Got {s}.")

    base = decompose(spec, mu, cluster_tol)
    scaled = decompose(spec, s * np.asarray(mu, dtype=float), cluster_tol)

    if base.signature != scaled.signature:
        logger.warning(
            "Signature changed under scaling by %s: %s -> %s", s, base.signature, scaled.signature
        )
        return HomogeneityReport(
            passed=False,
            signature_match=False,
            b_residual=float("nan"),
            projection_residual=float("nan"),
        )

    b_residual = float(np.max(np.abs(scaled.b - s * base.b), initial=0.0)) / (
        s * max(float(np.max(base.b, initial=0.0)), 1e-300)
    )
    projection_residual = max(
        float(np.max(np.abs(p - q), initial=0.0))
        for p, q in zip(base.projections, scaled.projections)
    )

    return HomogeneityReport(
        passed=b_residual <= 1e-8 and projection_residual <= 1e-8,
        signature_match=True,
        b_residual=b_residual,
        projection_residual=projection_residual,
    )


def _test_point(d1: int) -> np.ndarray:
    return 0.3 * np.array([(-1) ** j / (j + 1) for j in range(d1)])


def _gaussian(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.sum((points - center) ** 2, axis=-1))


def _finite_differences(function, points: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    @return: Laplacian (N,) and gradient (N, d) of `function` at `points` by central differences.
    """
    center = function(points)
    laplacian = np.zeros_like(center)
    gradient = np.zeros(points.shape, dtype=center.dtype)

    for axis in range(points.shape[1]):
        step = np.zeros(points.shape[1])
        step[axis] = h
        forward, backward = function(points + step), function(points - step)
        laplacian += (forward - 2 * center + backward) / h ** 2
        gradient[:, axis] = (forward - backward) / (2 * h)

    return laplacian, gradient


def conjugation_residual(
    spec: GroupSpec, mu, grid: Grid, cluster_tol: float = None
) -> float:
    """
    Compares L^mu g at x = R y with the anisotropic twisted Laplacian of g o R at y,
    both by second order central differences on a shifted Gaussian g.

    @return: Relative L2 difference over the grid nodes y.
    """
    if grid.spacing > config.CONJUGATION_MAX_SPACING:
        raise GridError(
            f"Grid spacing should be at most {config.CONJUGATION_MAX_SPACING}. Got {grid.spacing}."
        )
    if grid.dim != spec.d1:
        raise DimensionMismatch(f"Grid dimension should be {spec.d1}. Got {grid.dim}.")

    decomposition = decompose(spec, mu, cluster_tol)
    rotation = decomposition.rotation
    j_mu = decomposition.j_mu
    h = grid.spacing

    center = _test_point(spec.d1)
    g = lambda x: _gaussian(x, center)
    rotated = lambda y: _gaussian(y @ rotation.T, center)

    y = grid.flat_points()
    x = y @ rotation.T

    laplacian, gradient = _finite_differences(g, x, h)
    jx = x @ j_mu.T
    twisted = (
        -laplacian
        + 0.25 * np.sum(jx ** 2, axis=1) * g(x)
        - 1j * np.sum(jx * gradient, axis=1)
    )

    laplacian, gradient = _finite_differences(rotated, y, h)
    model = -laplacian.astype(complex)
    offset = decomposition.r0
    for b_n, r_n in zip(decomposition.b, decomposition.r):
        block = y[:, offset : offset + 2 * r_n]
        block_gradient = gradient[:, offset : offset + 2 * r_n]
        j_block = block @ standard_symplectic(r_n).T
        model += 0.25 * b_n ** 2 * np.sum(block ** 2, axis=1) * rotated(y)
        model -= 1j * b_n * np.sum(j_block * block_gradient, axis=1)
        offset += 2 * r_n

    return float(np.linalg.norm(twisted - model) / np.linalg.norm(twisted))
