import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Union

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import (
    ConfigurationError,
    DimensionMismatch,
    InvalidParameter,
)
from sublaplacian_sdk.group.presets import preset
from sublaplacian_sdk.group.type import GroupClass, GroupSpec
from sublaplacian_sdk.methods.typing import ClassificationReport, ValidationReport

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int, float, str]


def j_of_mu(spec: GroupSpec, mu) -> np.ndarray:
    """
    @param spec: Group spec
    @param mu: Covector of length d2
    @return: J_mu = sum_k mu_k J^(k)
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (spec.d2,):
        raise DimensionMismatch(
            f"`mu` should have length {spec.d2}. Got shape {mu.shape}."
        )

    return np.tensordot(mu, spec.structure, axes=1)


def bracket(spec: GroupSpec, x, x2) -> np.ndarray:
    """
    Bracket of two first layer vectors, as a vector of the second layer.

    @return: (<J^(k) x, x2>)_k
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != (spec.d1,) or x2.shape != (spec.d1,):
        raise DimensionMismatch(
            f"Bracket arguments should have length {spec.d1}. Got {x.shape} and {x2.shape}."
        )

    return np.einsum("kij,i,j->k", spec.structure, x2, x)


def validate(spec: GroupSpec) -> ValidationReport:
    errors = []

    if spec.d1 < 1 or spec.d2 < 1:
        errors.append(f"dimensions should be positive, got d1={spec.d1}, d2={spec.d2}")

    skew_residual = float(
        np.max(np.abs(spec.structure + np.transpose(spec.structure, (0, 2, 1))), initial=0.0)
    )
    if skew_residual > config.SKEW_TOL:
        errors.append(f"structure matrices are not skew-symmetric (residual {skew_residual:.3e})")

    rank = int(np.linalg.matrix_rank(spec.structure.reshape(spec.d2, -1)))
    if rank != spec.d2:
        errors.append(f"structure matrices are linearly dependent (rank {rank} < {spec.d2})")

    return ValidationReport(
        passed=not errors,
        skew_residual=skew_residual,
        rank=rank,
        errors=errors,
    )


def random_directions(d2: int, samples: int, seed: int) -> np.ndarray:
    """
    @return: Array (samples, d2) of seeded unit vectors.
    """
    if samples < 1:
        raise InvalidParameter(f"`samples` should be at least 1. Got {samples}.")

    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((samples, d2))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0] = 1.0

    return directions / norms


def classify(
    spec: GroupSpec, samples: int = 16, seed: int = None
) -> ClassificationReport:
    """
    Sample based classification into Heisenberg type, Metivier or general groups.

    @param spec: Group spec
    @param samples: Count of random unit directions mu
    @param seed: RNG seed, config.DEFAULT_SEED if not provided
    @return: Class together with the evidence it was decided on.
    """
    seed = config.DEFAULT_SEED if seed is None else seed
    directions = random_directions(spec.d2, samples, seed)

    identity = np.eye(spec.d1)
    htype_residual = 0.0
    min_singular_value = np.inf

    for mu in directions:
        j_mu = j_of_mu(spec, mu)
        htype_residual = max(htype_residual, float(np.linalg.norm(j_mu @ j_mu + identity)))
        min_singular_value = min(
            min_singular_value,
            float(np.linalg.svd(j_mu, compute_uv=False).min()),
        )

    if htype_residual <= config.CLASSIFY_TOL:
        group_class = GroupClass.HeisenbergType
    elif min_singular_value >= config.CLASSIFY_TOL:
        group_class = GroupClass.Metivier
    else:
        group_class = GroupClass.General

    probabilistic = not spec.preset
    if probabilistic:
        logger.warning(
            "Classification of `%s` as %s is based on %s sampled directions only",
            spec.label or "group",
            group_class.name,
            samples,
        )

    return ClassificationReport(
        group_class=group_class,
        directions=directions.tolist(),
        htype_residual=htype_residual,
        min_singular_value=min_singular_value,
        probabilistic=probabilistic,
    )


def _to_fraction(value: Rational) -> Fraction:
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 6)
    return Fraction(value)


def stein_tomas_exponent(n: int) -> Fraction:
    """
    @return: p_n = 2(n+1)/(n+3)
    """
    if n < 1:
        raise InvalidParameter(f"Stein-Tomas exponent needs n >= 1. Got {n}.")

    return Fraction(2 * (n + 1), n + 3)


def theta_interpolation(p: Rational, p_min: Rational) -> Fraction:
    """
    Solves 1/p = (1 - theta) + theta/p_min for theta.
    """
    p, p_min = _to_fraction(p), _to_fraction(p_min)

    if not 1 <= p_min <= 2:
        raise InvalidParameter(f"`p_min` should lie in [1, 2]. Got {p_min}.")

    if not 1 <= p <= p_min:
        raise InvalidParameter(f"`p` should lie in [1, {p_min}]. Got {p}.")

    if p_min == 1:
        return Fraction(1)

    return (1 - 1 / p) / (1 - 1 / p_min)


def load_group(source: Union[GroupSpec, Dict[str, Any], str]) -> GroupSpec:
    """
    @param source: Group spec, dict in the JSON layout, path to a JSON file or a preset name.
    @return: Group spec
    """
    if isinstance(source, GroupSpec):
        return source

    if isinstance(source, dict):
        return GroupSpec.from_dict(source)

    if isinstance(source, str) and os.path.isfile(source):
        with open(source, encoding="utf-8") as file:
            try:
                data = json.load(file)
            except json.JSONDecodeError as error:
                raise ConfigurationError(
                    f"Group file `{source}` is not valid JSON: {error.msg} (line {error.lineno}, column {error.colno})"
                )
        return GroupSpec.from_dict(data)

    if isinstance(source, str):
        return preset(source)

    raise ConfigurationError(f"Can not load group from {type(source).__name__}.")
