import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import InvalidParameter
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.laguerre import (
    BlockParams,
    LatticePoint,
    diagonal_weight,
    eigenfunction_basis,
    enumerate_lattice,
    projection_kernel,
    projection_normalization,
    twisted_convolution,
)
from sublaplacian_sdk.methods.typing import EnvelopeReport, ScalingReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterSpec:
    """
    Spectral cluster 1_{[K, K+1)} of the anisotropic twisted Laplacian of type `params`.
    """

    K: int
    params: BlockParams
    c: Optional[float] = None

    def __post_init__(self):
        if self.K < 0:
            raise InvalidParameter(f"`K` should be nonnegative. Got {self.K}.")
        if self.c is None:
            object.__setattr__(self, "c", projection_normalization(self.params))
        if self.c <= 0:
            raise InvalidParameter(f"Normalization should be positive. Got {self.c}.")

    @property
    def window(self) -> Tuple[float, float]:
        return float(self.K), float(self.K + 1)


@dataclass
class ExponentFit:
    xs: np.ndarray
    ys: np.ndarray
    slope: float
    intercept: float
    residual: float
    k_range: Tuple[int, int]


@dataclass
class NormEstimate:
    value: float
    p: float
    converged: bool = True
    iterations: int = 0
    history: List[float] = field(default_factory=list, repr=False)


def cluster_members(cs: ClusterSpec) -> List[LatticePoint]:
    return enumerate_lattice(cs.params, cs.window)


def _diagonal_sum(members: Sequence[LatticePoint], params: BlockParams) -> float:
    return sum(diagonal_weight(member, params) for member in members)


def norm_1to2_exact(cs: ClusterSpec) -> float:
    """
    L1 -> L2 norm of the cluster projection, sqrt of its kernel diagonal.
    """
    return math.sqrt(cs.c * _diagonal_sum(cluster_members(cs), cs.params))


class ClusterOperator:
    """
    Discrete cluster projection on a grid.

    Built from the closed-form eigenbasis of every member, orthonormalized in the trapezoid
    inner product, so it is an exact orthogonal projection of l2_w.
    """

    def __init__(self, cs: ClusterSpec, grid: Grid):
        if grid.dim > 4:
            raise InvalidParameter(f"Grid operators support total dimension up to 4. Got {grid.dim}.")
        if grid.size > config.GRID_MAX_POINTS:
            raise InvalidParameter(
                f"Grid of {grid.size} points exceeds GRID_MAX_POINTS={config.GRID_MAX_POINTS}."
            )

        self.cluster = cs
        self.grid = grid
        self.members = cluster_members(cs)
        self._root_weights = np.sqrt(grid.weights().ravel())

        labels, samples = eigenfunction_basis(self.members, cs.params, grid)
        self.labels = labels

        if samples.shape[1]:
            q, _ = scipy.linalg.qr(samples * self._root_weights[:, None], mode="economic")
            self._basis = q
        else:
            self._basis = np.zeros((grid.size, 0), dtype=complex)

        logger.debug(
            "Cluster K=%s: %s members, rank %s on %s grid", cs.K, len(self.members), self.rank, grid.shape
        )

    @property
    def rank(self) -> int:
        return self._basis.shape[1]

    def apply(self, f: np.ndarray) -> np.ndarray:
        f = self.grid.check(f)
        scaled = f.ravel() * self._root_weights
        projected = self._basis @ (self._basis.conj().T @ scaled)
        return (projected / self._root_weights).reshape(self.grid.shape)

    def apply_convolution(self, f: np.ndarray) -> np.ndarray:
        """
        Same projection as a sum of twisted convolutions with c phi_k.
        """
        result = np.zeros(self.grid.shape, dtype=complex)
        for member in self.members:
            kernel = projection_kernel(member, self.cluster.params, self.cluster.c)
            result += twisted_convolution(f, kernel.profile, self.cluster.params, self.grid)
        return result

    def self_adjointness_residual(self, seed: int = None) -> float:
        rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
        f = rng.standard_normal(self.grid.shape) + 1j * rng.standard_normal(self.grid.shape)
        g = rng.standard_normal(self.grid.shape) + 1j * rng.standard_normal(self.grid.shape)

        left = self.grid.inner(self.apply(f), g)
        right = self.grid.inner(f, self.apply(g))
        return abs(left - right) / (self.grid.norm(f) * self.grid.norm(g))

    def idempotency_residual(self, f: np.ndarray = None, seed: int = None) -> float:
        if f is None:
            rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
            f = rng.standard_normal(self.grid.shape) + 1j * rng.standard_normal(self.grid.shape)

        once = self.apply(f)
        return self.grid.norm(self.apply(once) - once) / self.grid.norm(f)


def _dual_direction(h: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    """
    Maximizer of Re <f, h>_w over the unit ball of l^p_w.
    """
    if p == 1:
        index = int(np.argmax(np.abs(h)))
        f = np.zeros_like(h)
        magnitude = abs(h[index])
        f[index] = (h[index] / magnitude if magnitude else 1.0) / weights[index]
        return f

    q = p / (p - 1)
    magnitude = np.abs(h)
    phase = np.divide(h, magnitude, out=np.zeros_like(h), where=magnitude > 0)
    f = magnitude ** (q - 1) * phase
    norm = np.sum(weights * np.abs(f) ** p) ** (1 / p)
    return f / norm if norm > 0 else f


def _lp_normalized(f: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    norm = np.sum(weights * np.abs(f) ** p) ** (1 / p)
    return f / norm


def norm_p_to_2_lower(
    cs: ClusterSpec,
    p: float,
    grid: Grid,
    restarts: int = 4,
    seed: int = None,
    normalized: bool = False,
    operator: ClusterOperator = None,
) -> NormEstimate:
    """
    Lower bound for the l^p_w -> l^2_w norm of the discrete cluster projection.

    Alternating power method: f -> dual direction of P f in l^p_w. The quotient
    ||P f||_2 / ||f||_p is nondecreasing along the iteration; the best over a bump
    start and `restarts` seeded random starts is returned.

    @param normalized: Use probability weights w / sum(w)
    """
    if not 1 <= p <= 2:
        raise InvalidParameter(f"`p` should lie in [1, 2]. Got {p}.")

    seed = config.DEFAULT_SEED if seed is None else seed
    operator = ClusterOperator(cs, grid) if operator is None else operator

    if operator.rank == 0:
        return NormEstimate(value=0.0, p=p)

    weights = grid.weights().ravel()
    if normalized:
        weights = weights / np.sum(weights)

    def quotient(f: np.ndarray) -> Tuple[float, np.ndarray]:
        h = operator.apply(f.reshape(grid.shape)).ravel()
        return math.sqrt(max(float(np.real(np.sum(weights * np.conj(f) * h))), 0.0)), h

    starts = [np.exp(-np.sum(grid.flat_points() ** 2, axis=1) / (2 * grid.spacing ** 2)).astype(complex)]
    for restart in range(restarts):
        rng = np.random.default_rng([seed, cs.K, restart])
        starts.append(rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size))

    best = NormEstimate(value=0.0, p=p, converged=False)
    for start in starts:
        f = _lp_normalized(start, weights, p)
        value, h = quotient(f)
        history = [value]
        converged = False

        for iteration in range(1, config.POWER_MAX_ITERATIONS + 1):
            candidate = _dual_direction(h, weights, p)
            candidate_value, candidate_h = quotient(candidate)

            if candidate_value <= value * (1 + config.POWER_TOL):
                converged = True
                break

            f, value, h = candidate, candidate_value, candidate_h
            history.append(value)

        if value > best.value:
            best = NormEstimate(
                value=value, p=p, converged=converged, iterations=len(history), history=history
            )

    if not best.converged:
        logger.warning(
            "Power method for K=%s, p=%s stopped after %s iterations without converging",
            cs.K,
            p,
            config.POWER_MAX_ITERATIONS,
        )

    return best


def scaling_identity_check(cs: ClusterSpec, mu_norm: float) -> ScalingReport:
    """
    Compares the L1 -> L2 norm of the cluster [K s, (K+1) s) of type (s b, r) with s^{d/4}
    times the unit cluster norm, d = 2|r|.
    """
    if mu_norm <= 0:
        raise InvalidParameter(f"`mu_norm` should be positive. Got {mu_norm}.")

    members = cluster_members(cs)
    scaled_params = cs.params.scaled(mu_norm)
    scaled_members = enumerate_lattice(scaled_params, (cs.K * mu_norm, (cs.K + 1) * mu_norm))

    unit_norm = norm_1to2_exact(cs)
    rescaled_norm = math.sqrt(cs.c * _diagonal_sum(scaled_members, scaled_params))

    expected = mu_norm ** (2 * cs.params.total_r / 4)
    ratio = rescaled_norm / unit_norm if unit_norm else float("nan")
    passed = bool(unit_norm) and abs(ratio / expected - 1) <= 1e-12

    return ScalingReport(
        passed=passed,
        unit_norm=unit_norm,
        rescaled_norm=rescaled_norm,
        ratio=ratio,
        expected=expected,
        members_match=members == scaled_members,
    )


def fit_exponent(series: Sequence[Tuple[int, float]], K_min: int = 0) -> ExponentFit:
    """
    Least squares slope of log(norm) against log(K + 1), empty clusters excluded.
    """
    samples = [(K, value) for K, value in series if K >= K_min and value > 0]
    if len(samples) < 8:
        raise InvalidParameter(f"Exponent fit needs at least 8 nonempty samples. Got {len(samples)}.")

    ks = np.array([K for K, _ in samples])
    xs = np.log(ks + 1.0)
    ys = np.log(np.array([value for _, value in samples]))

    slope, intercept = np.polyfit(xs, ys, 1)
    residual = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))

    return ExponentFit(
        xs=xs,
        ys=ys,
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        k_range=(int(ks.min()), int(ks.max())),
    )


def cluster_exponent(d1: int, p: float) -> float:
    """
    @return: d1/2 (1/p - 1/2) - 1/2
    """
    return d1 / 2 * (1 / p - 1 / 2) - 1 / 2


def envelope_check(
    series: Sequence[Tuple[int, float]], K_fit: int, exponent: float, slack: float = 0.05
) -> EnvelopeReport:
    """
    Fits C at K_fit and checks norm(K) <= C (K+1)^exponent (1 + slack) for every sample.
    """
    values = dict(series)
    if K_fit not in values:
        raise InvalidParameter(f"`K_fit`={K_fit} is not among the sampled K.")

    constant = values[K_fit] / (K_fit + 1) ** exponent

    worst_ratio, worst_K = 0.0, None
    for K, value in series:
        ratio = value / (constant * (K + 1) ** exponent)
        if ratio > worst_ratio:
            worst_ratio, worst_K = ratio, K

    return EnvelopeReport(
        passed=worst_ratio <= 1 + slack,
        constant=constant,
        worst_ratio=worst_ratio,
        worst_K=worst_K,
    )
