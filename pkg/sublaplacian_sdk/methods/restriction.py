import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma, jv

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import (
    ConfigurationError,
    DimensionMismatch,
    InvalidParameter,
    SamplingError,
    SignatureDriftError,
)
from sublaplacian_sdk.group.type import GroupSpec
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.laguerre import (
    BlockParams,
    diagonal_weight,
    eigenfunction_basis,
    eigenvalue,
    enumerate_lattice,
    laguerre_sequence,
)
from sublaplacian_sdk.methods.sphere import sphere_quadrature
from sublaplacian_sdk.methods.symplectic import MuDecomposition, decompose, decompose_many
from sublaplacian_sdk.methods.typing import SandwichReport

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SampledFunction:
    """
    Function on the half-open interval [a, b) given by samples at a + j h, h = (b - a) / n.

    Evaluation interpolates linearly, extends the last sample up to b and vanishes outside.
    """

    support: Tuple[float, float]
    samples: np.ndarray

    def __post_init__(self):
        self.support = (float(self.support[0]), float(self.support[1]))
        self.samples = np.asarray(self.samples, dtype=float)

        if not self.support[0] < self.support[1]:
            raise InvalidParameter(f"Support should be a nonempty interval. Got {self.support}.")
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise SamplingError(f"Samples should be a nonempty 1-D array. Got shape {self.samples.shape}.")

    @classmethod
    def indicator(cls, a: float, b: float, n: int = 4000) -> "SampledFunction":
        return cls((a, b), np.ones(n))

    @classmethod
    def smooth_bump(cls, a: float, b: float, n: int = 4000) -> "SampledFunction":
        """
        exp(1 - 1/(1 - t^2)) with t running over (-1, 1) across [a, b), peak 1 at the center.
        """
        t = 2 * (np.arange(n) / n) - 1
        inside = np.abs(t) < 1
        values = np.zeros(n)
        values[inside] = np.exp(1 - 1 / (1 - t[inside] ** 2))
        return cls((a, b), values)

    @classmethod
    def from_callable(cls, function: Callable, support: Tuple[float, float], n: int = 4000) -> "SampledFunction":
        a, b = support
        return cls((a, b), function(a + (b - a) * np.arange(n) / n))

    @property
    def spacing(self) -> float:
        return (self.support[1] - self.support[0]) / self.samples.size

    @property
    def diameter(self) -> float:
        return self.support[1] - self.support[0]

    def nodes(self) -> np.ndarray:
        return self.support[0] + self.spacing * np.arange(self.samples.size)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        a, b = self.support
        h = self.spacing

        position = (lam - a) / h
        index = np.clip(np.floor(position).astype(int), 0, self.samples.size - 1)
        fraction = np.clip(position - index, 0.0, 1.0)

        extended = np.append(self.samples, self.samples[-1])
        value = extended[index] + (extended[index + 1] - extended[index]) * fraction

        return np.where((lam >= a) & (lam < b), value, 0.0)[()]

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.samples ** 2) * self.spacing))

    def to_dict(self) -> Dict[str, Any]:
        return {"support": list(self.support), "samples": self.samples.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SampledFunction":
        try:
            return cls(tuple(data["support"]), np.array(data["samples"], dtype=float))
        except (KeyError, TypeError, ValueError) as error:
            raise ConfigurationError(f"Bad sampled function: {error}")


@dataclass(eq=False)
class MultiplierPair:
    """
    Spectral multiplier F supported in A and cutoff chi, both on compact subsets of (0, inf),
    with dyadic truncation level ell.
    """

    F: SampledFunction
    chi: SampledFunction
    ell: int = 0

    def __post_init__(self):
        for name, function in (("F", self.F), ("chi", self.chi)):
            if function.support[0] <= 0:
                raise InvalidParameter(
                    f"`{name}` should be supported in (0, inf). Got {function.support}."
                )
            if function.spacing > config.SAMPLING_MAX_RELATIVE_SPACING * function.diameter * (1 + 1e-9):
                raise SamplingError(
                    f"`{name}` sample spacing should be at most {config.SAMPLING_MAX_RELATIVE_SPACING} "
                    f"of its support diameter. Got {function.samples.size} samples."
                )

    def with_ell(self, ell: int) -> "MultiplierPair":
        return replace(self, ell=int(ell))

    def to_dict(self) -> Dict[str, Any]:
        return {"F": self.F.to_dict(), "chi": self.chi.to_dict(), "ell": self.ell}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MultiplierPair":
        missing = [key for key in ("F", "chi") if key not in data]
        if missing:
            raise ConfigurationError(f"Multiplier pair is missing fields: {', '.join(missing)}")

        return cls(
            F=SampledFunction.from_dict(data["F"]),
            chi=SampledFunction.from_dict(data["chi"]),
            ell=int(data.get("ell", 0)),
        )


def load_multiplier_pair(path: str) -> MultiplierPair:
    try:
        with open(path, encoding="utf-8") as file:
            data = json.load(file)
    except json.JSONDecodeError as error:
        raise ConfigurationError(
            f"Multiplier file `{path}` is not valid JSON: {error.msg} (line {error.lineno}, column {error.colno})"
        )
    except OSError as error:
        raise ConfigurationError(f"Can not read multiplier file `{path}`: {error}")

    return MultiplierPair.from_dict(data)


def save_multiplier_pair(path: str, pair: MultiplierPair) -> None:
    with open(path, "w", encoding="utf-8") as file:
        json.dump(pair.to_dict(), file)


@dataclass(frozen=True)
class PlancherelMeasure:
    """
    Pushforward of Lebesgue measure on R^r0 under tau -> |tau|^2: Dirac at 0 for r0 = 0,
    density pi^{r0/2} / Gamma(r0/2) s^{r0/2 - 1} otherwise.
    """

    r0: int

    def __post_init__(self):
        if self.r0 < 0:
            raise InvalidParameter(f"`r0` should be nonnegative. Got {self.r0}.")

    def density(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.r0 == 0:
            raise InvalidParameter("The measure for r0 = 0 is a Dirac mass and has no density.")
        return (np.pi ** (self.r0 / 2) / gamma(self.r0 / 2) * np.where(s > 0, s, 0.0) ** (self.r0 / 2 - 1))[()]

    @property
    def sphere_area(self) -> float:
        return 2 * np.pi ** (self.r0 / 2) / gamma(self.r0 / 2)

    def integrate(self, g: Callable, lo: float = 0.0, hi: float = None, order: int = 64) -> float:
        """
        int g(s) d sigma(s) over [lo, hi], with the substitution s = v^2.
        """
        if self.r0 == 0:
            return float(g(0.0)) if lo <= 0 else 0.0
        if hi is None:
            raise InvalidParameter("Upper bound is required for r0 > 0.")

        x, w = leggauss(order)
        v_lo, v_hi = math.sqrt(max(lo, 0.0)), math.sqrt(max(hi, 0.0))
        v = v_lo + (v_hi - v_lo) * (x + 1) / 2
        return float(self.sphere_area * np.sum(w * (v_hi - v_lo) / 2 * v ** (self.r0 - 1) * g(v ** 2)))


@dataclass(frozen=True)
class QuadratureConfig:
    radial_nodes: int = 64
    lambda_refine: int = 1
    tau_nodes: int = 64
    chunk: int = 16

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(
            radial_nodes=2 * self.radial_nodes,
            lambda_refine=2 * self.lambda_refine,
            tau_nodes=2 * self.tau_nodes,
            chunk=self.chunk,
        )


def cowling_sikora_norm(F: SampledFunction, M: float) -> float:
    """
    ((1/M) sum_K sup_{[(K-1)/M, K/M)} |F|^2)^{1/2}, suprema taken over samples.
    """
    if M <= 0:
        raise InvalidParameter(f"`M` should be positive. Got {M}.")
    if F.spacing * M > 0.25:
        raise SamplingError(
            f"Sampling is too coarse for M={M}: every window needs at least 4 samples."
        )

    window = np.floor(F.nodes() * M).astype(int)
    window -= window.min()
    suprema = np.zeros(window.max() + 1)
    np.maximum.at(suprema, window, F.samples ** 2)

    return float(np.sqrt(np.sum(suprema) / M))


def norm_lower_sandwich_check(F: SampledFunction, M: float, slack: float = None) -> SandwichReport:
    """
    Checks ||F||_2 <= ||F||_{M,2} (1 + slack).
    """
    slack = config.QUADRATURE_SLACK if slack is None else slack
    l2_norm = F.l2_norm()
    cs_norm = cowling_sikora_norm(F, M)

    return SandwichReport(passed=l2_norm <= cs_norm * (1 + slack), l2_norm=l2_norm, cs_norm=cs_norm)


def _sphere_decompositions(
    spec: GroupSpec, nodes: np.ndarray, cluster_tol: float = None
) -> List[MuDecomposition]:
    decompositions = decompose_many(spec, nodes, cluster_tol)

    signatures = {decomposition.signature for decomposition in decompositions}
    if len(signatures) > 1:
        first = decompositions[0].signature
        drifted = [
            node.tolist() for node, decomposition in zip(nodes, decompositions)
            if decomposition.signature != first
        ]
        raise SignatureDriftError(
            f"Signature varies across sphere nodes: {sorted(signatures)}; nodes differing from {first}: {drifted}"
        )

    return decompositions


def _outer_grid(F: SampledFunction, refine: int) -> Tuple[np.ndarray, float]:
    """
    Midpoints of the sample cells of F, each split into `refine` parts.
    """
    dt = F.spacing / refine
    t = F.support[0] + dt * (np.arange(F.samples.size * refine) + 0.5)
    return t, dt


def _diagonal_weights(members, params: BlockParams) -> np.ndarray:
    return np.array([diagonal_weight(member, params) for member in members], dtype=float)


def _node_integral(
    params: BlockParams,
    f2: np.ndarray,
    t: np.ndarray,
    dt: float,
    mp: MultiplierPair,
    d2: int,
    quad: QuadratureConfig,
) -> float:
    """
    sum_k B_k int |F(t)|^2 int g_k(t - s) d sigma_{r0}(s) dt for one sphere node.
    """
    chi_lo, chi_hi = mp.chi.support
    scale = 2.0 ** (-mp.ell)
    upper = mp.F.support[1] / (chi_lo * scale)

    members = enumerate_lattice(params, (0.0, upper * (1 + 1e-12)))
    if not members:
        return 0.0

    lam_k = np.array([eigenvalue(member, params) for member in members])
    diagonal = _diagonal_weights(members, params)
    exponent = d2 - 1 + params.total_r

    def g(lam: np.ndarray, lk: np.ndarray) -> np.ndarray:
        positive = lam > 0
        ratio = np.where(positive, lam, 0.0) / lk
        value = ratio ** exponent * mp.chi(ratio / scale) ** 2 / lk
        return np.where(positive, value, 0.0)

    measure = PlancherelMeasure(params.r0)
    x, w = leggauss(quad.radial_nodes)

    total = 0.0
    for start in range(0, len(members), quad.chunk):
        lk = lam_k[start : start + quad.chunk, None]
        if params.r0 == 0:
            inner = g(t[None, :], lk)
        else:
            lam_lo, lam_hi = lk * chi_lo * scale, lk * chi_hi * scale
            v_lo = np.sqrt(np.maximum(t[None, :] - lam_hi, 0.0))
            v_hi = np.sqrt(np.maximum(t[None, :] - lam_lo, 0.0))
            v = v_lo[..., None] + (v_hi - v_lo)[..., None] * (x + 1) / 2
            integrand = v ** (params.r0 - 1) * g(t[None, :, None] - v ** 2, lk[..., None])
            inner = measure.sphere_area * (v_hi - v_lo) / 2 * np.sum(w * integrand, axis=-1)

        total += float(np.sum(diagonal[start : start + quad.chunk, None] * f2[None, :] * inner) * dt)

    return total


def plancherel_kernel_norm(
    spec: GroupSpec, mp: MultiplierPair, quad: QuadratureConfig = None, cluster_tol: float = None
) -> float:
    """
    L2 norm of the convolution kernel of F(L) chi(2^ell U) through the Plancherel formula,
    the mu integral taken in polar coordinates over the sphere quadrature.
    """
    quad = QuadratureConfig() if quad is None else quad
    nodes, weights = sphere_quadrature(spec.d2)
    decompositions = _sphere_decompositions(spec, nodes, cluster_tol)

    t, dt = _outer_grid(mp.F, quad.lambda_refine)
    f2 = mp.F(t) ** 2

    if not np.any(f2):
        return 0.0

    cache: Dict[Tuple[float, ...], float] = {}
    total = 0.0
    for weight, decomposition in zip(weights, decompositions):
        params = decomposition.block_params
        key = tuple(round(b_n, 10) for b_n in params.b)
        if key not in cache:
            cache[key] = _node_integral(params, f2, t, dt, mp, spec.d2, quad)
        total += weight * cache[key]

    r0 = decompositions[0].r0
    total_r = (spec.d1 - r0) // 2
    prefactor = (2 * np.pi) ** (total_r - spec.d1 - spec.d2)

    return math.sqrt(max(prefactor * total, 0.0))


def ell0_threshold(
    spec: GroupSpec,
    A: Tuple[float, float],
    chi_support: Tuple[float, float],
    sphere_nodes: np.ndarray = None,
    cluster_tol: float = None,
) -> int:
    """
    Smallest ell0 such that the kernel vanishes for every ell < -ell0.
    """
    if not 0 < A[0] < A[1] or not 0 < chi_support[0] < chi_support[1]:
        raise InvalidParameter(f"Supports should be compact in (0, inf). Got A={A}, chi={chi_support}.")

    nodes = sphere_quadrature(spec.d2)[0] if sphere_nodes is None else np.asarray(sphere_nodes, dtype=float)
    decompositions = decompose_many(spec, nodes, cluster_tol)

    m_star = min(
        float(sum(r_n * b_n for r_n, b_n in zip(decomposition.r, decomposition.b)))
        for decomposition in decompositions
    )
    if m_star < 1e-10:
        raise InvalidParameter(
            f"Minimal ground energy {m_star:.3e} vanishes, the second layer is degenerate."
        )

    # Ties resolve to the larger ell0, b carries rounding from the eigensolver
    bound = A[1] / (chi_support[0] * m_star) * (1 + 1e-12)

    ell0 = 0
    while math.ldexp(1.0, ell0 + 1) > bound:
        ell0 -= 1
    while not math.ldexp(1.0, ell0 + 1) > bound:
        ell0 += 1

    return ell0


def _hankel_radial(
    F: SampledFunction, lam_k: np.ndarray, radius: float, r0: int, nodes: int
) -> np.ndarray:
    """
    int_{R^r0} e^{i tau y} F(|tau|^2 + lambda_k) d tau for every lambda_k, |y| = radius.
    """
    a, b = F.support
    x, w = leggauss(nodes)
    v_lo = np.sqrt(np.maximum(a - lam_k, 0.0))[:, None]
    v_hi = np.sqrt(np.maximum(b - lam_k, 0.0))[:, None]
    v = v_lo + (v_hi - v_lo) * (x + 1) / 2
    values = F(v ** 2 + lam_k[:, None])
    half = (v_hi - v_lo)[:, 0] / 2

    if radius == 0:
        area = 2 * np.pi ** (r0 / 2) / gamma(r0 / 2)
        return area * half * np.sum(w * values * v ** (r0 - 1), axis=1)

    order = r0 / 2 - 1
    factor = (2 * np.pi) ** (r0 / 2) * radius ** (1 - r0 / 2)
    return factor * half * np.sum(w * values * jv(order, v * radius) * v ** (r0 / 2), axis=1)


def _spectral_profile(F: SampledFunction, params: BlockParams, y: np.ndarray, tau_nodes: int) -> float:
    """
    Kernel of F(anisotropic twisted Laplacian) at (y, 0), without the (2 pi) normalization.
    """
    members = enumerate_lattice(params, (0.0, F.support[1]))
    if not members:
        return 0.0

    ks = np.array([member.k for member in members])
    profile = np.ones(len(members))
    for n, (offset, b_n, r_n) in enumerate(zip(params.block_offsets(), params.b, params.r)):
        rho2 = float(np.sum(y[offset : offset + 2 * r_n] ** 2))
        sequence = laguerre_sequence(int(ks[:, n].max()), r_n - 1, 0.5 * b_n * rho2)
        profile *= b_n ** r_n * sequence[ks[:, n]] * math.exp(-0.25 * b_n * rho2)

    lam_k = np.array([eigenvalue(member, params) for member in members])

    if params.r0 == 0:
        return float(np.sum(F(lam_k) * profile))

    radius = float(np.linalg.norm(y[: params.r0]))
    return float(np.sum(_hankel_radial(F, lam_k, radius, params.r0, tau_nodes) * profile))


def conv_kernel_eval(
    spec: GroupSpec,
    mp: MultiplierPair,
    x,
    u,
    quad: QuadratureConfig = None,
    cluster_tol: float = None,
) -> complex:
    """
    Convolution kernel of F(L) chi(2^ell U) at (x, u) by quadrature over mu in polar coordinates.
    """
    quad = QuadratureConfig() if quad is None else quad
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (spec.d1,) or u.shape != (spec.d2,):
        raise DimensionMismatch(
            f"Kernel arguments should have lengths {spec.d1} and {spec.d2}. Got {x.shape} and {u.shape}."
        )

    nodes, weights = sphere_quadrature(spec.d2)
    decompositions = _sphere_decompositions(spec, nodes, cluster_tol)

    chi_lo, chi_hi = mp.chi.support
    scale = 2.0 ** (-mp.ell)
    gl_x, gl_w = leggauss(quad.radial_nodes)
    rho = scale * (chi_lo + (chi_hi - chi_lo) * (gl_x + 1) / 2)
    rho_weights = scale * (chi_hi - chi_lo) / 2 * gl_w
    cutoff = mp.chi(rho / scale)

    r0 = decompositions[0].r0
    total_r = (spec.d1 - r0) // 2
    prefactor = (2 * np.pi) ** (-r0 - total_r - spec.d2)

    total = 0j
    for omega, weight, decomposition in zip(nodes, weights, decompositions):
        y = decomposition.rotation.T @ x
        base = decomposition.block_params
        for radius, radius_weight, chi_value in zip(rho, rho_weights, cutoff):
            if chi_value == 0:
                continue
            value = _spectral_profile(mp.F, base.scaled(radius), y, quad.tau_nodes)
            if value == 0:
                continue
            total += (
                weight
                * radius_weight
                * radius ** (spec.d2 - 1)
                * np.exp(1j * radius * float(omega @ u))
                * chi_value
                * value
            )

    return complex(prefactor * total)


@dataclass(frozen=True)
class JointGrid:
    """
    Grid on g1 x g2 = R^2 x R: a 2-D centered grid for x and a centered u axis.
    """

    x: Grid
    u_points: int
    u_spacing: float

    def __post_init__(self):
        if self.x.dim != 2:
            raise DimensionMismatch(f"x grid should be 2-D. Got {self.x.dim}.")
        if self.u_points < 2 or self.u_spacing <= 0:
            raise InvalidParameter(f"Bad u axis: {self.u_points} points, spacing {self.u_spacing}.")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.x.shape + (self.u_points,)

    def u_nodes(self) -> np.ndarray:
        return self.u_spacing * (np.arange(self.u_points) - (self.u_points - 1) / 2)

    def frequencies(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.u_points, self.u_spacing)

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.x.weights()[..., None] * np.abs(f) ** 2) * self.u_spacing))


@dataclass
class JointMultiplierResult:
    output: np.ndarray
    captured_fraction: float
    flagged: bool
    output_norm: float
    plancherel_norm: float


def apply_joint_multiplier(
    spec: GroupSpec, f: np.ndarray, mp: MultiplierPair, grid: JointGrid, cluster_tol: float = None
) -> JointMultiplierResult:
    """
    F(L) chi(2^ell U) f on the Heisenberg group H1: Fourier transform along u, expansion of
    every slice in the Landau levels of L^mu, multiplication by F(lambda_k^mu) chi(2^ell |mu|)
    and resynthesis.
    """
    if spec.d1 != 2 or spec.d2 != 1:
        raise InvalidParameter(
            f"Joint multipliers are implemented on H1 only (d1=2, d2=1). Got d1={spec.d1}, d2={spec.d2}."
        )

    f = np.asarray(f)
    if f.shape != grid.shape:
        raise DimensionMismatch(f"`f` should have shape {grid.shape}. Got {f.shape}.")

    transformed = np.fft.fft(f, axis=2)
    frequencies = grid.frequencies()
    root = np.sqrt(grid.x.weights().ravel())
    weights = root ** 2

    masses = np.array([np.sum(weights * np.abs(transformed[..., j].ravel()) ** 2) for j in range(grid.u_points)])
    total_mass = float(np.sum(masses))
    result = np.zeros_like(transformed, dtype=complex)
    captured = 0.0
    plancherel = 0.0

    for j, mu in enumerate(frequencies):
        if masses[j] <= config.JOINT_NEGLIGIBLE_MASS * total_mass:
            continue
        cutoff = float(mp.chi(2.0 ** mp.ell * abs(mu)))
        if cutoff == 0:
            captured += masses[j]
            continue
        if mu == 0:
            logger.warning("Slice mu=0 carries %.3e of the mass and is dropped", masses[j] / total_mass)
            continue

        decomposition = decompose(spec, [mu], cluster_tol)
        b = float(decomposition.b[0])
        params = BlockParams(b=(b,), r=(1,))

        residual = root * transformed[..., j].ravel()
        synthesized = np.zeros_like(residual)

        for level in range(config.JOINT_MAX_LEVEL + 1):
            _, samples = eigenfunction_basis([(level,)], params, grid.x, rotation=decomposition.rotation)
            if samples.shape[1] == 0:
                break

            q, _ = scipy.linalg.qr(root[:, None] * samples, mode="economic")
            coefficients = q.conj().T @ residual
            piece = q @ coefficients
            residual = residual - piece

            multiplier = float(mp.F(b * (2 * level + 1))) * cutoff
            synthesized += multiplier * piece

            energy = float(np.sum(np.abs(coefficients) ** 2))
            captured += energy
            plancherel += multiplier ** 2 * energy

            if np.sum(np.abs(residual) ** 2) <= 1e-12 * masses[j]:
                break

        result[..., j] = (synthesized / root).reshape(grid.x.shape)

    output = np.fft.ifft(result, axis=2)
    parseval = grid.u_spacing / grid.u_points
    captured_fraction = captured / total_mass if total_mass else 1.0
    flagged = captured_fraction < config.CAPTURED_MASS_MIN

    if flagged:
        logger.warning(
            "Laguerre expansion captured only %.5f of the mass (minimum %s)",
            captured_fraction,
            config.CAPTURED_MASS_MIN,
        )

    return JointMultiplierResult(
        output=output,
        captured_fraction=captured_fraction,
        flagged=flagged,
        output_norm=grid.norm(output),
        plancherel_norm=math.sqrt(parseval * plancherel),
    )


def _bump_level_mass(k: np.ndarray, b: np.ndarray, width: float) -> np.ndarray:
    """
    ||P_k^mu G||^2 for the normalized Gaussian G of the given width, b = |mu| b^omega.
    """
    a = b * width ** 2 / 2
    return b / (2 * np.pi) * ((1 - a) ** k / (1 + a) ** (k + 1)) ** 2


def restriction_ratio(
    spec: GroupSpec,
    mp: MultiplierPair,
    bump_width: float = 0.05,
    quad: QuadratureConfig = None,
    cluster_tol: float = None,
) -> float:
    """
    ||F(L) chi(2^ell U) f||_2 / (2^{-ell d2/2} ||F||_2 ||f||_1) on H1 for a Gaussian bump f
    of unit mass, through the per-mu Laguerre coefficients of the bump.
    """
    if spec.d1 != 2 or spec.d2 != 1:
        raise InvalidParameter(
            f"Restriction ratio is implemented on H1 only (d1=2, d2=1). Got d1={spec.d1}, d2={spec.d2}."
        )
    if bump_width <= 0:
        raise InvalidParameter(f"`bump_width` should be positive. Got {bump_width}.")

    quad = QuadratureConfig() if quad is None else quad
    frequency = float(decompose(spec, [1.0], cluster_tol).b[0])

    t, dt = _outer_grid(mp.F, quad.lambda_refine)
    f2 = mp.F(t) ** 2
    norm_F = mp.F.l2_norm()
    if norm_F == 0:
        return 0.0

    scale = 2.0 ** (-mp.ell)
    top = int(mp.F.support[1] / (frequency * mp.chi.support[0] * scale) // 2) + 1

    total = 0.0
    for start in range(0, top + 1, quad.chunk):
        k = np.arange(start, min(start + quad.chunk, top + 1))[:, None]
        odd = 2 * k + 1
        mu = t[None, :] / (frequency * odd)
        values = (
            f2[None, :]
            * mp.chi(mu / scale) ** 2
            * np.exp(-(bump_width * mu) ** 2)
            * _bump_level_mass(k, frequency * mu, bump_width)
            / (frequency * odd)
        )
        total += float(np.sum(values) * dt)

    # Both signs of mu contribute equally
    norm = math.sqrt(2 * total / (2 * np.pi))
    return norm / (math.sqrt(scale) * norm_F)


def restriction_ratio_grid(
    spec: GroupSpec,
    mp: MultiplierPair,
    grid: JointGrid,
    bump_width: float = 1.0,
    cluster_tol: float = None,
) -> float:
    """
    Same ratio as `restriction_ratio`, with F(L) chi(2^ell U) applied to the sampled Gaussian bump
    on a joint grid and both norms taken by quadrature.
    """
    if bump_width <= 0:
        raise InvalidParameter(f"`bump_width` should be positive. Got {bump_width}.")

    norm_F = mp.F.l2_norm()
    if norm_F == 0:
        return 0.0

    x, y = grid.x.coordinates()
    u = grid.u_nodes()
    bump_x = np.exp(-(x ** 2 + y ** 2) / (2 * bump_width ** 2)) / (2 * np.pi * bump_width ** 2)
    bump_u = np.exp(-(u ** 2) / (2 * bump_width ** 2)) / (math.sqrt(2 * np.pi) * bump_width)
    f = bump_x[..., None] * bump_u

    mass = float(np.sum(grid.x.weights() * bump_x) * np.sum(bump_u) * grid.u_spacing)
    result = apply_joint_multiplier(spec, f, mp, grid, cluster_tol)
    if result.flagged:
        logger.warning("Grid restriction ratio uses an incomplete Laguerre expansion")

    return result.output_norm / (math.sqrt(2.0 ** (-mp.ell)) * norm_F * mass)
