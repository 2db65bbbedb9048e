import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import DimensionMismatch, InvalidParameter, PoleProximityError
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.laguerre import (
    BlockParams,
    enumerate_lattice,
    eigenvalue,
    phi,
    projection_normalization,
    twisted_convolution,
)
from sublaplacian_sdk.methods.typing import DispersiveReport, DispersiveRow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexTime:
    """
    Complex time zeta with Re(zeta) > 0, flagged against the rectangle 0 < Re <= 1, |Im| <= alpha.
    """

    zeta: complex
    alpha: Optional[float] = None
    in_rectangle: bool = field(init=False)

    def __post_init__(self):
        zeta = complex(self.zeta)
        object.__setattr__(self, "zeta", zeta)

        if zeta.real <= 0:
            raise InvalidParameter(f"Complex time should have positive real part. Got {zeta}.")

        object.__setattr__(
            self,
            "in_rectangle",
            self.alpha is not None and zeta.real <= 1 and abs(zeta.imag) <= self.alpha,
        )

    @classmethod
    def of(cls, value: Union["ComplexTime", complex, float]) -> "ComplexTime":
        return value if isinstance(value, ComplexTime) else cls(complex(value))


def _check_pole(zeta: complex):
    k = round(zeta.real / math.pi)
    if k != 0 and abs(zeta - k * math.pi) < config.POLE_GUARD:
        raise PoleProximityError(f"{zeta} is within {config.POLE_GUARD} of the pole {k}*pi.")


def s_fn(zeta: complex) -> complex:
    """
    S(zeta) = zeta / sin(zeta), with S(0) = 1.
    """
    zeta = complex(zeta)
    _check_pole(zeta)

    if abs(zeta) < config.TAYLOR_SWITCH:
        z2 = zeta * zeta
        return 1 + z2 / 6 + 7 * z2 ** 2 / 360 + 31 * z2 ** 3 / 15120

    return zeta / cmath.sin(zeta)


def t_fn(zeta: complex) -> complex:
    """
    T(zeta) = zeta / tan(zeta), with T(0) = 1.
    """
    zeta = complex(zeta)
    _check_pole(zeta)

    if abs(zeta) < config.TAYLOR_SWITCH:
        z2 = zeta * zeta
        return 1 - z2 / 3 - z2 ** 2 / 45 - 2 * z2 ** 3 / 945

    return zeta * cmath.cos(zeta) / cmath.sin(zeta)


def _split(p: BlockParams, x: np.ndarray):
    if x.shape[-1] != p.d1:
        raise DimensionMismatch(f"Points should have last axis {p.d1}. Got shape {x.shape}.")

    radical = np.sum(x[..., : p.r0] ** 2, axis=-1)
    blocks = [
        np.sum(x[..., offset : offset + 2 * r_n] ** 2, axis=-1)
        for offset, r_n in zip(p.block_offsets(), p.r)
    ]
    return radical, blocks


def heat_kernel(zeta: Union[ComplexTime, complex, float], p: BlockParams, x) -> np.ndarray:
    """
    Mehler kernel (4 pi zeta)^{-d1/2} exp(-|x0|^2 / 4 zeta) prod_n S(i zeta b_n)^{r_n} exp(-T(i zeta b_n) |x_n|^2 / 4 zeta).

    @param zeta: Complex time with positive real part
    @param p: Block parameters
    @param x: Point(s) with last axis d1
    """
    zeta = ComplexTime.of(zeta).zeta
    x = np.asarray(x, dtype=float)
    radical, blocks = _split(p, x)

    value = (4 * np.pi * zeta) ** (-p.d1 / 2) * np.exp(-radical / (4 * zeta))
    for b_n, r_n, norm2 in zip(p.b, p.r, blocks):
        argument = 1j * zeta * b_n
        value = value * s_fn(argument) ** r_n * np.exp(-t_fn(argument) * norm2 / (4 * zeta))

    return value


def heat_kernel_expansion(t: float, p: BlockParams, x, lambda_max: float) -> np.ndarray:
    """
    Heat kernel at real time t as the truncated eigen-expansion sum_{lambda_k <= lambda_max} e^{-t lambda_k} c phi_k.
    """
    if t <= 0:
        raise InvalidParameter(f"Time should be positive. Got {t}.")

    p.require_positive()
    x = np.asarray(x, dtype=float)
    radical, _ = _split(p, x)

    c = projection_normalization(p)
    total = np.zeros(x.shape[:-1])
    for point in enumerate_lattice(p, (0.0, np.nextafter(lambda_max, np.inf))):
        term = np.full(x.shape[:-1], c * np.exp(-t * eigenvalue(point, p)))
        for offset, k_n, b_n, r_n in zip(p.block_offsets(), point.k, p.b, p.r):
            term = term * phi(k_n, b_n, r_n, x[..., offset : offset + 2 * r_n])
        total += term

    return total * (4 * np.pi * t) ** (-p.r0 / 2) * np.exp(-radical / (4 * t))


def _decay_radius(zeta: complex, p: BlockParams) -> Optional[float]:
    rates = [(1 / zeta).real] + [(t_fn(1j * zeta * b_n) / zeta).real for b_n in p.b]
    rate = min(rates)
    if rate <= 0:
        return None

    # exp(-rate |v|^2 / 4) < exp(-40) outside
    return math.sqrt(4 * 40 / rate)


def heat_apply(
    f: np.ndarray,
    zeta: Union[ComplexTime, complex, float],
    p: BlockParams,
    grid: Grid,
    kernel_radius: Optional[float] = None,
) -> np.ndarray:
    """
    Twisted convolution of f with the heat kernel at `zeta`.
    """
    zeta = ComplexTime.of(zeta).zeta
    kernel_radius = _decay_radius(zeta, p) if kernel_radius is None else kernel_radius

    return twisted_convolution(
        f,
        lambda v: heat_kernel(zeta, p, v),
        p,
        grid,
        kernel_radius=kernel_radius,
    )


def _origin_scan_value(zeta: complex, p: BlockParams) -> float:
    return float(abs(heat_kernel(zeta, p, np.zeros(p.d1))) * abs(zeta) ** (p.d1 / 2))


def _admissible_alpha(p: BlockParams, alpha: float):
    top = max(p.b, default=0.0)
    if top > 0 and alpha >= math.pi / top:
        raise InvalidParameter(
            f"`alpha` should be below pi/max(b) = {math.pi / top:.6g}. Got {alpha}."
        )


def dispersive_scan(p: BlockParams, alpha: float, n_samples: int, seed: int = None) -> DispersiveReport:
    """
    Samples zeta in the rectangle 0 < Re <= 1, |Im| <= alpha and reports
    sup_zeta |p_zeta(0)| |zeta|^{d1/2}.
    """
    _admissible_alpha(p, alpha)
    if n_samples < 1:
        raise InvalidParameter(f"`n_samples` should be at least 1. Got {n_samples}.")

    seed = config.DEFAULT_SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    real = 1.0 - rng.uniform(0.0, 1.0, n_samples)
    imag = rng.uniform(-alpha, alpha, n_samples)

    values = []
    origin_is_sup = True
    for zeta in real + 1j * imag:
        values.append(_origin_scan_value(zeta, p))
        # |p_zeta(x)| peaks at x = 0 when every Gaussian factor decays
        rates = [(1 / zeta).real] + [(t_fn(1j * zeta * b_n) / zeta).real for b_n in p.b]
        origin_is_sup = origin_is_sup and min(rates) >= 0

    if not origin_is_sup:
        logger.warning("Some sampled zeta have growing Gaussian factors, sup is not attained at x=0")

    constant = max(values)
    rows: List[DispersiveRow] = [
        DispersiveRow(
            zeta_re=float(zeta.real),
            zeta_im=float(zeta.imag),
            sup_value=value / abs(zeta) ** (p.d1 / 2),
            bound_value=constant / abs(zeta) ** (p.d1 / 2),
        )
        for zeta, value in zip(real + 1j * imag, values)
    ]

    return DispersiveReport(constant=constant, origin_is_sup=origin_is_sup, rows=rows)


def dispersive_blowup(p: BlockParams, n_points: int, epsilon: float = 1e-3) -> List[DispersiveRow]:
    """
    Scan values along zeta = epsilon + i theta pi / max(b), theta = 1 - 2^{-j} for j = 1..n_points.

    Rows carry |p_zeta(0)| as `sup_value` and the scan value |p_zeta(0)| |zeta|^{d1/2} as `bound_value`.
    """
    p.require_positive()
    top = max(p.b)

    rows = []
    for j in range(1, n_points + 1):
        zeta = complex(epsilon, (1 - 2.0 ** (-j)) * math.pi / top)
        value = _origin_scan_value(zeta, p)
        rows.append(
            DispersiveRow(
                zeta_re=zeta.real,
                zeta_im=zeta.imag,
                sup_value=value / abs(zeta) ** (p.d1 / 2),
                bound_value=value,
            )
        )
    return rows


def fejer_pair(K: int, lam) -> np.ndarray:
    """
    F_K(lam) = (2/pi) (x - sin x) / x^3 with x = lam - K.
    """
    x = np.asarray(lam, dtype=float) - K
    small = np.abs(x) < 1e-2
    safe = np.where(small, 1.0, x)

    x2 = x * x
    series = 1 / 6 - x2 / 120 + x2 ** 2 / 5040 - x2 ** 3 / 362880
    value = np.where(small, series, (safe - np.sin(safe)) / safe ** 3)

    return (2 / np.pi * value)[()]


def fejer_fourier_check(
    K: int, half_width: float = 4e4, spacing: float = 0.1, frequencies=None
) -> float:
    """
    Max deviation of the numerical Fourier transform of F_K from (1 - |xi|)_+^2 e^{-i K xi}.
    """
    frequencies = np.linspace(-1.5, 1.5, 31) if frequencies is None else np.asarray(frequencies)

    lam = K + np.arange(-half_width, half_width + spacing / 2, spacing)
    values = fejer_pair(K, lam)
    weights = np.full(lam.shape, spacing)
    weights[[0, -1]] *= 0.5

    error = 0.0
    for xi in frequencies:
        numeric = np.sum(weights * values * np.exp(-1j * lam * xi))
        exact = max(0.0, 1 - abs(xi)) ** 2 * np.exp(-1j * K * xi)
        error = max(error, abs(numeric - exact))

    return float(error)


def damped_fejer(K: int, lam, alpha: float) -> np.ndarray:
    """
    G_K(lam) = F_0(alpha (lam - K) / 2) exp(-alpha lam / (2 (K + 1))).
    """
    lam = np.asarray(lam, dtype=float)
    return (fejer_pair(0, 0.5 * alpha * (lam - K)) * np.exp(-alpha * lam / (2 * (K + 1))))[()]


def damped_fejer_floor(K: int, alpha: float, samples: int = 1001) -> float:
    """
    @return: inf of G_K over [K, K + 1), sampled.
    """
    lam = np.linspace(K, K + 1, samples, endpoint=False)
    return float(np.min(damped_fejer(K, lam, alpha)))
