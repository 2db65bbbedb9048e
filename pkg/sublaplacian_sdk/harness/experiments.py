import itertools
import logging
import math
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import ConfigurationError, InvalidParameter
from sublaplacian_sdk.group.type import GroupSpec
from sublaplacian_sdk.harness.experiment import make_verdict
from sublaplacian_sdk.methods.cluster import (
    ClusterSpec,
    cluster_exponent,
    cluster_members,
    envelope_check,
    fit_exponent,
    norm_1to2_exact,
    norm_p_to_2_lower,
    scaling_identity_check,
)
from sublaplacian_sdk.methods.grid import Grid
from sublaplacian_sdk.methods.group import classify, random_directions, validate
from sublaplacian_sdk.methods.heat import (
    dispersive_scan,
    heat_apply,
    heat_kernel,
    heat_kernel_expansion,
)
from sublaplacian_sdk.methods.laguerre import (
    BlockParams,
    LatticePoint,
    apply_twisted_laplacian,
    diagonal_weight,
    eigenvalue,
    enumerate_lattice,
    phi,
    projection_kernel,
    twisted_convolution,
)
from sublaplacian_sdk.methods.pool import pool_map
from sublaplacian_sdk.methods.restriction import (
    JointGrid,
    MultiplierPair,
    QuadratureConfig,
    SampledFunction,
    apply_joint_multiplier,
    ell0_threshold,
    load_multiplier_pair,
    norm_lower_sandwich_check,
    plancherel_kernel_norm,
    restriction_ratio,
    restriction_ratio_grid,
)
from sublaplacian_sdk.methods.symplectic import (
    check_homogeneity,
    conjugation_residual,
    decompose,
    decompose_many,
)
from sublaplacian_sdk.methods.typing import Verdict

logger = logging.getLogger(__name__)


class Experiment:
    """
    Base experiment: `rows` yields CSV records in a deterministic order, `verdicts` is read
    once the rows are exhausted.
    """

    name: str = ""
    columns: Tuple[str, ...] = ()

    def __init__(self, spec: GroupSpec, parameters: Dict[str, Any], seed: int):
        self.spec = spec
        self.parameters = parameters
        self.seed = seed
        self._verdicts: List[Verdict] = []

    def param(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(key, default)

    def rows(self) -> Iterator[Dict[str, Any]]:
        raise NotImplementedError

    def verdicts(self) -> List[Verdict]:
        return self._verdicts

    def verdict(self, criterion: str, passed: bool, observed: Any, expected: Any):
        self._verdicts.append(make_verdict(criterion, passed, observed, expected))

    def block_params(self) -> BlockParams:
        """
        Twisted block type from `b`/`r` parameters, or from the decomposition at `mu` (first basis covector by default).
        """
        if "b" in self.parameters:
            b = tuple(float(b_n) for b_n in self.parameters["b"])
            r = tuple(int(r_n) for r_n in self.parameters.get("r", [1] * len(b)))
            return BlockParams(b=b, r=r)

        mu = self.param("mu")
        if mu is None:
            mu = np.eye(self.spec.d2)[0]
        decomposition = decompose(self.spec, mu, self.param("cluster_tol"))
        if decomposition.r0:
            logger.info("Radical of dimension %s is dropped, working with the twisted part", decomposition.r0)

        return BlockParams(b=tuple(decomposition.b.tolist()), r=decomposition.r)


class ValidateExperiment(Experiment):
    name = "validate"
    columns = ("check", "value", "passed")

    def rows(self):
        report = validate(self.spec)
        yield {"check": "skew_residual", "value": report["skew_residual"], "passed": report["passed"]}
        yield {"check": "rank", "value": report["rank"], "passed": report["rank"] == self.spec.d2}

        classification = classify(self.spec, samples=self.param("samples", 16), seed=self.seed)
        yield {"check": "htype_residual", "value": classification["htype_residual"], "passed": True}
        yield {"check": "min_singular_value", "value": classification["min_singular_value"], "passed": True}
        yield {"check": "group_class", "value": classification["group_class"].name, "passed": True}

        self.verdict(
            "group-valid",
            report["passed"],
            "; ".join(report["errors"]) or "skew, full rank",
            "skew structure constants with rank d2",
        )


class DecomposeExperiment(Experiment):
    name = "decompose"
    columns = (
        "sample",
        "b",
        "r",
        "r0",
        "spectral",
        "idempotency",
        "orthogonality",
        "rotation",
        "symplectic",
        "max_residual",
    )

    def rows(self):
        samples = self.param("samples", 100)
        tol = self.param("residual_tol", 1e-8)
        directions = random_directions(self.spec.d2, samples, self.seed)
        decompositions = decompose_many(self.spec, directions, self.param("cluster_tol"))

        worst = 0.0
        signatures = set()
        for index, decomposition in enumerate(decompositions):
            residuals = decomposition.residuals()
            worst = max(worst, decomposition.max_residual())
            signatures.add(decomposition.signature)
            yield {
                "sample": index,
                "b": ";".join(format(b_n, ".17g") for b_n in decomposition.b),
                "r": ";".join(str(r_n) for r_n in decomposition.r),
                "r0": decomposition.r0,
                "spectral": residuals["spectral"],
                "idempotency": residuals["idempotency"],
                "orthogonality": residuals["orthogonality"],
                "rotation": residuals["rotation"],
                "symplectic": residuals["symplectic"],
                "max_residual": decomposition.max_residual(),
            }

        self.verdict("symplectic-residuals", worst <= tol, f"{worst:.3e}", f"<= {tol}")
        self.verdict(
            "signature-constant",
            len(signatures) == 1,
            sorted(signatures),
            "one signature over all sampled directions",
        )

        self._homogeneity(directions)
        if self.param("conjugation", True):
            self._conjugation(directions[0])

    def _homogeneity(self, directions: np.ndarray):
        s = float(self.param("scale", 2.0))
        count = min(len(directions), self.param("homogeneity_samples", 10))
        reports = [check_homogeneity(self.spec, mu, s, self.param("cluster_tol")) for mu in directions[:count]]
        worst = max(max(report["b_residual"], report["projection_residual"]) for report in reports)
        self.verdict(
            "homogeneity",
            all(report["passed"] for report in reports),
            f"worst residual {worst:.3e} over {count} directions",
            f"b and projections homogeneous under mu -> {s} mu",
        )

    def _conjugation(self, mu: np.ndarray):
        if self.spec.d1 <= 2:
            grid = Grid.centered(121, 3.0, dim=self.spec.d1)
        else:
            grid = Grid(points=9, spacing=0.05, dim=self.spec.d1)

        residual = conjugation_residual(self.spec, mu, grid, self.param("cluster_tol"))
        tol = self.param("conjugation_tol", 5e-3)
        self.verdict("conjugation", residual <= tol, f"{residual:.3e}", f"<= {tol}")


class SpectrumExperiment(Experiment):
    name = "spectrum"
    columns = ("k", "lambda", "weight", "check", "residual")

    def rows(self):
        params = self.block_params()
        lambda_max = float(self.param("lambda_max", 20.0))
        members = enumerate_lattice(params, (0.0, lambda_max))

        for member in members:
            yield {
                "k": ";".join(str(k_n) for k_n in member.k),
                "lambda": eigenvalue(member, params),
                "weight": diagonal_weight(member, params),
            }

        ranges = [range(int(lambda_max / (2 * b_n)) + 2) for b_n in params.b]
        brute = sorted(
            LatticePoint(k)
            for k in itertools.product(*ranges)
            if eigenvalue(k, params) < lambda_max
        )
        self.verdict(
            "lattice-complete",
            brute == sorted(members),
            f"{len(members)} points",
            f"{len(brute)} points by exhaustive scan",
        )

        if self.param("projection_suite", False):
            yield from self._projection_suite(params)

    def _projection_suite(self, params: BlockParams):
        if params.d1 != 2:
            logger.warning("Projection suite runs on a single 2-D block only, got d1=%s", params.d1)
            return

        grid = Grid.centered(self.param("grid_points", 81), self.param("half_width", 15.0))
        kernel_radius = self.param("kernel_radius", 14.0)
        x, y = grid.coordinates()
        # Level k modes reach past radius 8, compare where the truncated integrals are exact
        inner = np.hypot(x, y) <= self.param("inner_radius", 6.0)
        f = np.exp(-((x - 0.5) ** 2 + (y + 0.25) ** 2) / 2) * (1 + 0.3j * x)

        kernels = [projection_kernel((k,), params).profile for k in range(self.param("k_max", 5) + 1)]
        idempotency, orthogonality = 0.0, 0.0
        for k, kernel in enumerate(kernels):
            once = twisted_convolution(f, kernel, params, grid, kernel_radius)
            twice = twisted_convolution(once, kernel, params, grid, kernel_radius)
            scale = np.linalg.norm(once[inner]) or 1.0

            residual = float(np.linalg.norm((twice - once)[inner]) / scale)
            idempotency = max(idempotency, residual)
            yield {"k": k, "check": "idempotency", "residual": residual}

            for j in range(k):
                cross = twisted_convolution(once, kernels[j], params, grid, kernel_radius)
                residual = float(np.linalg.norm(cross[inner]) / scale)
                orthogonality = max(orthogonality, residual)
                yield {"k": f"{j},{k}", "check": "orthogonality", "residual": residual}

        tol = self.param("projection_tol", 1e-6)
        self.verdict("projection-idempotency", idempotency <= tol, f"{idempotency:.3e}", f"<= {tol}")
        self.verdict("projection-orthogonality", orthogonality <= tol, f"{orthogonality:.3e}", f"<= {tol}")

        yield from self._eigenrelation(params)

    def _eigenrelation(self, params: BlockParams):
        grid = Grid.centered(self.param("eigen_points", 241), self.param("eigen_half_width", 6.0))
        points = np.stack(grid.coordinates(), axis=-1)
        inner = np.linalg.norm(points, axis=-1) <= self.param("eigen_inner_radius", 4.0)
        b = params.b[0]

        worst = 0.0
        for k in range(self.param("eigen_k_max", 3) + 1):
            mode = phi(k, b, 1, points)
            expected = eigenvalue((k,), params) * mode
            applied = apply_twisted_laplacian(mode, params, grid)
            residual = float(np.linalg.norm((applied - expected)[inner]) / np.linalg.norm(expected[inner]))
            worst = max(worst, residual)
            yield {"k": k, "lambda": eigenvalue((k,), params), "check": "eigenrelation", "residual": residual}

        tol = self.param("eigen_tol", 5e-3)
        self.verdict("eigenrelation", worst <= tol, f"{worst:.3e}", f"<= {tol}")


class ClusterScanExperiment(Experiment):
    name = "cluster-scan"
    columns = ("K", "members", "norm_exact_1to2", "norm_lower_p", "p", "slope_so_far")

    def rows(self):
        p = float(self.param("p", 1))
        params = self.block_params()
        default_step = 1 if p == 1 else 2
        K_values = list(
            range(
                self.param("K_min", 0 if p == 1 else 1),
                self.param("K_max", 401 if p == 1 else 61) + 1,
                self.param("K_step", default_step),
            )
        )

        if p == 1:
            computed = ((K, None) for K in K_values)
        else:
            computed = self._lower_bounds(K_values, p, params)

        series = []
        for K, lower in computed:
            cs = ClusterSpec(K, params)
            exact = norm_1to2_exact(cs)
            value = exact if p == 1 else lower
            if value:
                series.append((K, value))

            slope = fit_exponent(series).slope if len(series) >= 8 else None
            yield {
                "K": K,
                "members": len(cluster_members(cs)),
                "norm_exact_1to2": exact,
                "norm_lower_p": lower,
                "p": p,
                "slope_so_far": slope,
            }

        exponent = cluster_exponent(params.d1, p)
        if p == 1:
            tol = self.param("slope_tol", 0.05)
            fit = fit_exponent(series, K_min=self.param("K_fit_min", 0))
            self.verdict(
                "cluster-slope",
                abs(fit.slope - exponent) <= tol,
                f"{fit.slope:.4f}",
                f"{exponent:.4f} +- {tol}",
            )
        else:
            K_fit = self.param("K_fit", 11)
            report = envelope_check(series, K_fit, exponent, slack=self.param("slack", 0.05))
            self.verdict(
                "cluster-envelope",
                report["passed"],
                f"worst ratio {report['worst_ratio']:.4f} at K={report['worst_K']}",
                f"<= {1 + self.param('slack', 0.05):.2f} of C (K+1)^{exponent:.4f}",
            )

        self._scaling(K_values, params)

    def _scaling(self, K_values: List[int], params: BlockParams):
        mu_norm = float(self.param("mu_norm", 2.0))
        nonempty = [K for K in K_values if cluster_members(ClusterSpec(K, params))]
        failures = [K for K in nonempty if not scaling_identity_check(ClusterSpec(K, params), mu_norm)["passed"]]
        self.verdict(
            "scaling-identity",
            bool(nonempty) and not failures,
            f"{len(failures)} failures over {len(nonempty)} nonempty clusters",
            f"norms scale by {mu_norm}^(d/4) under mu -> {mu_norm} mu",
        )

    def _lower_bounds(self, K_values: List[int], p: float, params: BlockParams) -> Iterator[Tuple[int, float]]:
        points = self.param("grid_points")
        if points is None:
            points = min(181, int(config.GRID_MAX_POINTS ** (1 / params.d1)))
            points -= 1 - points % 2
        elif points ** params.d1 > config.GRID_MAX_POINTS:
            raise InvalidParameter(
                f"grid_points={points} in dimension {params.d1} exceeds GRID_MAX_POINTS={config.GRID_MAX_POINTS}."
            )
        grid = Grid.centered(points, self.param("half_width", 18.0), dim=params.d1)
        logger.info("Lower bounds on a %s grid, spacing %.3f", grid.shape, grid.spacing)
        restarts = self.param("restarts", 4)

        def estimate(K: int) -> Tuple[int, float]:
            cs = ClusterSpec(K, params)
            result = norm_p_to_2_lower(cs, p, grid, restarts=restarts, seed=self.seed)
            return K, result.value

        batch = max(1, config.POOL_MAX_BUNCH * max(1, config.MAX_WORKERS))
        for start in range(0, len(K_values), batch):
            yield from pool_map(estimate, K_values[start : start + batch])


class HeatCheckExperiment(Experiment):
    name = "heat-check"
    columns = ("zeta_re", "zeta_im", "sup_value", "bound_value")

    def rows(self):
        params = self.block_params()
        t = float(self.param("t", 0.5))
        lambda_max = float(self.param("lambda_max", 40.0))

        rng = np.random.default_rng(self.seed)
        points = 1.5 * rng.standard_normal((self.param("points", 25), params.d1))
        mehler = heat_kernel(t, params, points)
        expansion = heat_kernel_expansion(t, params, points, lambda_max)
        difference = float(np.max(np.abs(mehler - expansion)))
        tol = self.param("expansion_tol", 1e-8)
        self.verdict("mehler-expansion", difference <= tol, f"{difference:.3e}", f"<= {tol}")

        alpha = float(self.param("alpha", 0.5 * math.pi / max(params.b)))
        report = dispersive_scan(params, alpha, self.param("n_samples", 64), seed=self.seed)
        yield from report["rows"]

        self.verdict(
            "dispersive-constant",
            math.isfinite(report["constant"]) and report["origin_is_sup"],
            f"{report['constant']:.6g}",
            "finite constant attained at the origin",
        )

        if params.d1 == 2 and self.param("semigroup", True):
            self._semigroup(params, t)

    def _semigroup(self, params: BlockParams, t: float):
        grid = Grid.centered(self.param("grid_points", 65), self.param("half_width", 8.0))
        points = np.stack(grid.coordinates(), axis=-1)
        s = float(self.param("s", 0.25))

        composed = heat_apply(heat_kernel(s, params, points), t, params, grid)
        direct = heat_kernel(s + t, params, points)

        # Compare away from the grid boundary, where the truncated integral is exact to quadrature
        inner = np.linalg.norm(points, axis=-1) <= grid.half_width / 2
        error = float(np.max(np.abs(composed - direct)[inner]) / np.max(np.abs(direct)))
        tol = self.param("semigroup_tol", 1e-6)
        self.verdict("semigroup-law", error <= tol, f"{error:.3e}", f"<= {tol}")


class RestrictionScanExperiment(Experiment):
    name = "restriction-scan"
    columns = ("ell", "kernel_l2_norm", "predicted_scale", "ratio")

    def multiplier(self) -> MultiplierPair:
        if "multiplier" in self.parameters:
            return load_multiplier_pair(self.parameters["multiplier"])

        A = self.param("A", [1.0, 4.0])
        chi = self.param("chi_support", [0.5, 2.0])
        samples = self.param("samples", 4000)
        return MultiplierPair(
            F=SampledFunction.indicator(A[0], A[1], samples),
            chi=SampledFunction.smooth_bump(chi[0], chi[1], samples),
        )

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(
            radial_nodes=self.param("radial_nodes", 64),
            lambda_refine=self.param("lambda_refine", 1),
            tau_nodes=self.param("tau_nodes", 64),
        )

    def rows(self):
        pair = self.multiplier()
        quad = self.quadrature()
        cluster_tol = self.param("cluster_tol")
        ell_min, ell_max = self.param("ell_min", 2), self.param("ell_max", 8)
        d2 = self.spec.d2

        ells, norms = [], []
        reference = None
        for ell in range(ell_min, ell_max + 1):
            norm = plancherel_kernel_norm(self.spec, pair.with_ell(ell), quad, cluster_tol)
            reference = norm if reference is None else reference
            predicted = reference * 2.0 ** (-(ell - ell_min) * d2 / 2)
            ells.append(ell)
            norms.append(norm)
            yield {
                "ell": ell,
                "kernel_l2_norm": norm,
                "predicted_scale": predicted,
                "ratio": norm / predicted if predicted else None,
            }

        slope = float(np.polyfit(ells, np.log2(np.square(norms)), 1)[0])
        tol = 0.1 + 0.025 * (d2 - 1)
        self.verdict("plancherel-slope", abs(slope + d2) <= tol, f"{slope:.4f}", f"{-d2} +- {tol}")

        if self.param("check_convergence", True):
            refined = plancherel_kernel_norm(self.spec, pair.with_ell(ell_min), quad.doubled(), cluster_tol)
            change = abs(refined - norms[0]) / norms[0]
            self.verdict("self-convergence", change < 0.005, f"{change:.3e}", "< 0.005")

        self._threshold(pair, quad, cluster_tol)
        self._cowling_sikora()

        if self.spec.d1 == 2 and d2 == 1:
            band = self.param("band_ells", [2, 6])
            ratios = [
                restriction_ratio(self.spec, pair.with_ell(ell), self.param("bump_width", 0.05), quad, cluster_tol)
                for ell in range(band[0], band[1] + 1)
            ]
            spread = max(ratios) / min(ratios)
            self.verdict("restriction-band", spread <= 2.0, f"max/min {spread:.4f}", "<= 2")

            if self.param("joint_check", True):
                self._joint(quad, cluster_tol)

    def _joint(self, quad: QuadratureConfig, cluster_tol: Optional[float]):
        grid = JointGrid(x=Grid.centered(self.param("joint_points", 64), 6.0), u_points=64, u_spacing=0.6)
        x, y = grid.x.coordinates()
        u = grid.u_nodes()
        f = np.exp(-(x ** 2 + y ** 2) / 2)[..., None] * (np.sin(3 * u) * np.exp(-(u ** 2) / 18))

        identity = MultiplierPair(
            F=SampledFunction.indicator(0.05, 1000.0, 1000),
            chi=SampledFunction.indicator(0.05, 50.0, 1000),
        )
        result = apply_joint_multiplier(self.spec, f, identity, grid, cluster_tol)
        error = grid.norm(result.output - f) / grid.norm(f)
        self.verdict(
            "joint-identity",
            error <= 0.01 and not result.flagged,
            f"relative error {error:.3e}, captured {result.captured_fraction:.6f}",
            "<= 0.01 with the expansion complete",
        )

        smooth = MultiplierPair(
            F=SampledFunction.smooth_bump(1.0, 4.0),
            chi=SampledFunction.smooth_bump(0.5, 2.0),
            ell=-1,
        )
        on_grid = restriction_ratio_grid(self.spec, smooth, grid, 1.0, cluster_tol)
        analytic = restriction_ratio(self.spec, smooth, 1.0, quad, cluster_tol)
        change = abs(on_grid / analytic - 1)
        tol = self.param("joint_tol", 0.03)
        self.verdict(
            "restriction-grid",
            change <= tol,
            f"grid {on_grid:.6g}, quadrature {analytic:.6g}",
            f"relative difference <= {tol}",
        )

    def _threshold(self, pair: MultiplierPair, quad: QuadratureConfig, cluster_tol: Optional[float]):
        ell0 = ell0_threshold(self.spec, pair.F.support, pair.chi.support, cluster_tol=cluster_tol)
        below = plancherel_kernel_norm(self.spec, pair.with_ell(-ell0 - 1), quad, cluster_tol)
        base = plancherel_kernel_norm(self.spec, pair.with_ell(0), quad, cluster_tol)
        ratio = below / base if base else float("nan")

        expected = self.param("expected_ell0")
        passed = ratio <= 1e-10 and (expected is None or ell0 == expected)
        self.verdict(
            "ell0-threshold",
            passed,
            f"ell0={ell0}, norm ratio {ratio:.3e}",
            f"ell0={expected if expected is not None else 'any'}, ratio <= 1e-10",
        )

    def _cowling_sikora(self):
        rng = np.random.default_rng(self.seed)
        count = self.param("cs_samples", 100)
        failures = 0
        for _ in range(count):
            knots = rng.uniform(-1.0, 1.0, 9)
            samples = np.interp(np.arange(4000) / 4000, np.linspace(0, 1, 9), knots)
            function = SampledFunction((0.0, 1.0), samples)
            for M in (1, 2, 8):
                if not norm_lower_sandwich_check(function, M)["passed"]:
                    failures += 1

        self.verdict("cowling-sikora-sandwich", failures == 0, f"{failures} failures", "0 failures")


EXPERIMENTS = {
    experiment.name: experiment
    for experiment in (
        ValidateExperiment,
        DecomposeExperiment,
        SpectrumExperiment,
        ClusterScanExperiment,
        HeatCheckExperiment,
        RestrictionScanExperiment,
    )
}


def get_experiment(name: str):
    if name not in EXPERIMENTS:
        raise ConfigurationError(f"Experiment `{name}` has no row producer.")
    return EXPERIMENTS[name]
