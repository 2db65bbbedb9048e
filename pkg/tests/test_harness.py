import json
import os

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import ConfigurationError, DecompositionError, InvalidParameter, NumericalAbort
from sublaplacian_sdk.harness import run
from sublaplacian_sdk.harness.experiment import ExperimentConfig, ExperimentReport, make_verdict, read_csv
from sublaplacian_sdk.harness.experiments import SpectrumExperiment, ValidateExperiment
from sublaplacian_sdk.harness.report import report_bundle
from sublaplacian_sdk.main import main
from tests.fixtures import INLINE_H1
from tests.utils import MockTestCase


def failing_sidecar(name: str, timestamp: str) -> dict:
    return {
        "experiment": name,
        "csv": None,
        "verdicts": [
            make_verdict("symplectic-residuals", False, "1.000e-03", "<= 1e-08"),
        ],
        "provenance": {"timestamp": timestamp},
    }


class ExperimentConfigTest(MockTestCase):
    def test_defaults(self):
        experiment_config = ExperimentConfig(group="heisenberg:1", experiment="validate")

        self.assertEqual(experiment_config.seed, config.DEFAULT_SEED)
        self.assertEqual(experiment_config.output, "results")
        self.assertTrue(experiment_config.stem().startswith("validate-"))

    def test_validation(self):
        with self.assertRaises(ConfigurationError):
            ExperimentConfig(group="heisenberg:1", experiment="sweep")

        with self.assertRaises(ConfigurationError):
            ExperimentConfig(group=None, experiment="validate")

        with self.assertRaises(ConfigurationError):
            ExperimentConfig(group="heisenberg:1", experiment="decompose", parameters={"residual_tol": -1})

        with self.assertRaises(ConfigurationError):
            ExperimentConfig(group="heisenberg:1", experiment="validate", seed="7")

        with self.assertRaises(ConfigurationError):
            ExperimentConfig.from_dict({"group": "heisenberg:1"})

    def test_hash_is_stable(self):
        first = ExperimentConfig.from_dict(
            {"group": "heisenberg:1", "experiment": "spectrum", "parameters": {"lambda_max": 10, "b": [1.0]}}
        )
        second = ExperimentConfig.from_dict(
            {"parameters": {"b": [1.0], "lambda_max": 10}, "experiment": "spectrum", "group": "heisenberg:1"}
        )
        third = ExperimentConfig.from_dict(
            {"group": "heisenberg:1", "experiment": "spectrum", "parameters": {"lambda_max": 11, "b": [1.0]}}
        )

        self.assertEqual(first.config_hash(), second.config_hash())
        self.assertNotEqual(first.config_hash(), third.config_hash())

    def test_hash_ignores_output(self):
        first = ExperimentConfig(group="heisenberg:1", experiment="validate", output="results")
        second = ExperimentConfig(group="heisenberg:1", experiment="validate", output="elsewhere/results")

        self.assertEqual(first.config_hash(), second.config_hash())
        self.assertEqual(first.stem(), second.stem())

    def test_seed_from_parameters(self):
        experiment_config = ExperimentConfig.from_dict(
            {"group": "heisenberg:1", "experiment": "validate", "parameters": {"seed": 5}}
        )
        self.assertEqual(experiment_config.seed, 5)
        self.assertNotIn("seed", experiment_config.parameters)

    def test_malformed_file(self):
        path = self.tmp_path / "config.json"
        path.write_text('{"experiment": "validate",\n  "group": }', encoding="utf-8")

        with self.assertRaises(ConfigurationError) as context:
            ExperimentConfig.load(str(path))
        self.assertIn("line 2", str(context.exception))

        with self.assertRaises(ConfigurationError):
            ExperimentConfig.load(str(self.tmp_path / "missing.json"))

    def test_overrides(self):
        experiment_config = ExperimentConfig(
            group="heisenberg:1",
            experiment="validate",
            parameters={"CLUSTER_TOL": 1e-5, "UNKNOWN": 1, "samples": 4},
        )
        self.assertDictEqual(experiment_config.config_overrides(), {"CLUSTER_TOL": 1e-5})


class RunTest(MockTestCase):
    def setUp(self) -> None:
        self.output = str(self.tmp_path / "results")

    def test_validate(self):
        report = run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))

        self.assertTrue(report.passed)
        self.assertEqual(report.exit_code, 0)
        self.assertTrue(os.path.exists(report.csv_path))
        self.assertTrue(os.path.exists(report.sidecar_path))

        rows = read_csv(report.csv_path)
        self.assertListEqual([row["check"] for row in rows][:2], ["skew_residual", "rank"])
        self.assertEqual(rows[-1]["value"], "HeisenbergType")

        with open(report.sidecar_path, encoding="utf-8") as file:
            sidecar = json.load(file)
        self.assertEqual(sidecar["verdicts"][0]["criterion"], "group-valid")
        self.assertEqual(sidecar["provenance"]["config_hash"][:8], report.sidecar_path[-13:-5])

    def test_csv_is_deterministic(self):
        experiment_config = ExperimentConfig(group=INLINE_H1, experiment="decompose", output=self.output,
                                             parameters={"samples": 5})
        with open(run(experiment_config).csv_path, encoding="utf-8") as file:
            first = file.read()
        with open(run(experiment_config).csv_path, encoding="utf-8") as file:
            second = file.read()

        self.assertEqual(first, second)
        self.assertEqual(len(first.splitlines()), 6)

    def test_cluster_scan(self):
        report = run(
            ExperimentConfig(
                group="heisenberg:1",
                experiment="cluster-scan",
                output=self.output,
                parameters={"p": 1, "K_max": 100},
            )
        )

        self.assertTrue(report.passed)
        self.assertEqual(len(report.rows), 101)
        self.assertEqual(report.rows[2]["members"], 0)
        self.assertEqual(report.rows[3]["members"], 1)
        self.assertIn("scaling-identity", [verdict["criterion"] for verdict in report.verdicts])

    def test_cluster_scan_grid_limit(self):
        with self.assertRaises(InvalidParameter) as context:
            run(
                ExperimentConfig(
                    group="metivier-aniso:1,3",
                    experiment="cluster-scan",
                    output=self.output,
                    parameters={"p": 1.2, "grid_points": 181},
                )
            )
        self.assertIn("GRID_MAX_POINTS", str(context.exception))

        estimate = self.mocker.patch("sublaplacian_sdk.harness.experiments.norm_p_to_2_lower")
        estimate.return_value.value = 0.5
        run(
            ExperimentConfig(
                group="metivier-aniso:1,3",
                experiment="cluster-scan",
                output=self.output,
                parameters={"p": 1.2, "K_min": 11, "K_max": 11},
            )
        )
        grid = estimate.call_args[0][2]

        self.assertEqual((grid.dim, grid.points), (4, 21))
        self.assertLessEqual(grid.size, config.GRID_MAX_POINTS)

    def test_decompose_verdicts(self):
        report = run(
            ExperimentConfig(group=INLINE_H1, experiment="decompose", output=self.output, parameters={"samples": 5})
        )

        self.assertTrue(report.passed)
        self.assertListEqual(
            [verdict["criterion"] for verdict in report.verdicts],
            ["symplectic-residuals", "signature-constant", "homogeneity", "conjugation"],
        )

    def test_spectrum_suite(self):
        report = run(
            ExperimentConfig(
                group="heisenberg:1",
                experiment="spectrum",
                output=self.output,
                parameters={"lambda_max": 6.0, "projection_suite": True, "k_max": 1, "eigen_k_max": 1},
            )
        )

        self.assertTrue(report.passed)
        self.assertListEqual(
            [verdict["criterion"] for verdict in report.verdicts],
            ["lattice-complete", "projection-idempotency", "projection-orthogonality", "eigenrelation"],
        )
        self.assertListEqual(
            [row.get("check") for row in report.rows],
            [None] * 3 + ["idempotency", "idempotency", "orthogonality", "eigenrelation", "eigenrelation"],
        )
        self.assertTupleEqual(SpectrumExperiment.columns, ("k", "lambda", "weight", "check", "residual"))

    def test_restriction_joint_verdicts(self):
        report = run(
            ExperimentConfig(
                group="heisenberg:1",
                experiment="restriction-scan",
                output=self.output,
                parameters={
                    "ell_min": 2,
                    "ell_max": 4,
                    "check_convergence": False,
                    "cs_samples": 5,
                    "band_ells": [2, 3],
                    "joint_points": 32,
                    "JOINT_NEGLIGIBLE_MASS": 1e-10,
                },
            )
        )
        verdicts = {verdict["criterion"]: verdict for verdict in report.verdicts}

        self.assertTrue(verdicts["joint-identity"]["passed"], verdicts["joint-identity"])
        self.assertTrue(verdicts["restriction-grid"]["passed"], verdicts["restriction-grid"])

    def test_overrides_are_restored(self):
        original = config.CLUSTER_TOL
        seen = []

        def rows(experiment):
            seen.append(config.CLUSTER_TOL)
            yield {"check": "rank", "value": 1, "passed": True}

        self.mocker.patch.object(ValidateExperiment, "rows", rows)
        run(
            ExperimentConfig(
                group="heisenberg:1", experiment="validate", output=self.output, parameters={"CLUSTER_TOL": 1e-3}
            )
        )

        self.assertListEqual(seen, [1e-3])
        self.assertEqual(config.CLUSTER_TOL, original)

    def test_error_context(self):
        with self.assertRaises(InvalidParameter) as context:
            run(
                ExperimentConfig(
                    group="heisenberg:1",
                    experiment="spectrum",
                    output=self.output,
                    parameters={"b": [1.0], "lambda_max": -1.0},
                )
            )
        self.assertIn("[spectrum, row 1]", str(context.exception))

        def rows(experiment):
            yield {"check": "rank", "value": 1, "passed": True}
            raise NumericalAbort("eigensolver diverged")

        self.mocker.patch.object(ValidateExperiment, "rows", rows)
        with self.assertRaises(NumericalAbort) as context:
            run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))
        self.assertIn("eigensolver diverged [validate, row 2]", str(context.exception))

        def singular(experiment):
            yield {"check": "rank", "value": 1, "passed": True}
            raise np.linalg.LinAlgError("SVD did not converge")

        self.mocker.patch.object(ValidateExperiment, "rows", singular)
        with self.assertRaises(NumericalAbort) as context:
            run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))
        self.assertIn("SVD did not converge [validate, row 2]", str(context.exception))


class ReportTest(MockTestCase):
    def setUp(self) -> None:
        self.output = str(self.tmp_path / "results")

    def write_sidecar(self, name: str, data: dict):
        os.makedirs(self.output, exist_ok=True)
        with open(os.path.join(self.output, name), "w", encoding="utf-8") as file:
            json.dump(data, file)

    def test_bundle(self):
        run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))
        summary = report_bundle(self.output)

        self.assertTrue(summary["text"].startswith("1/1 criteria pass"))
        self.assertListEqual(summary["failing"], [])
        self.assertTrue(os.path.exists(os.path.join(self.output, "summary.txt")))

    def test_failing_criteria(self):
        run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))
        self.write_sidecar("decompose-00000000.json", failing_sidecar("decompose", "2024-01-01T00:00:00+00:00"))
        summary = report_bundle(self.output)

        self.assertEqual((summary["passed"], summary["total"]), (1, 2))
        self.assertIn("Failing criteria:", summary["text"])
        self.assertIn("decompose/symplectic-residuals: observed 1.000e-03", summary["text"])

    def test_duplicates_keep_latest(self):
        self.write_sidecar("decompose-00000000.json", failing_sidecar("decompose", "2024-01-01T00:00:00+00:00"))
        newer = failing_sidecar("decompose", "2024-02-01T00:00:00+00:00")
        newer["verdicts"] = [make_verdict("symplectic-residuals", True, "1e-12", "<= 1e-08")]
        self.write_sidecar("decompose-11111111.json", newer)

        with self.assertLogs("sublaplacian_sdk.harness.report", level="WARNING"):
            summary = report_bundle(self.output)
        self.assertEqual((summary["passed"], summary["total"]), (1, 1))

    def test_cluster_plot(self):
        run(
            ExperimentConfig(
                group="heisenberg:1", experiment="cluster-scan", output=self.output, parameters={"K_max": 40}
            )
        )
        summary = report_bundle(self.output)

        self.assertListEqual(summary["plots"], [os.path.join(self.output, "cluster-scan.png")])
        self.assertTrue(os.path.exists(summary["plots"][0]))

    def test_report_experiment(self):
        run(ExperimentConfig(group="heisenberg:1", experiment="validate", output=self.output))
        report = run(ExperimentConfig(group=None, experiment="report", output=self.output))

        self.assertTrue(report.passed)
        self.assertEqual(report.verdicts[0]["observed"], "1/1")

    def test_empty_directory(self):
        os.makedirs(self.output)
        with self.assertRaises(ConfigurationError):
            report_bundle(self.output)

        with self.assertRaises(ConfigurationError):
            report_bundle(str(self.tmp_path / "missing"))


class MainTest(MockTestCase):
    def setUp(self) -> None:
        self.output = str(self.tmp_path / "results")
        self.config_path = str(self.tmp_path / "config.json")
        with open(self.config_path, "w", encoding="utf-8") as file:
            json.dump({"group": "heisenberg:1", "experiment": "validate", "output": self.output}, file)

    def test_pass(self):
        self.assertEqual(main(["validate", "--config", self.config_path]), 0)
        self.assertTrue(os.listdir(self.output))

    def test_fail(self):
        report = ExperimentReport(
            experiment="validate",
            columns=[],
            rows=[],
            verdicts=[make_verdict("group-valid", False, "rank 1", "rank 2")],
            provenance={},
        )
        self.mocker.patch("sublaplacian_sdk.main.run", return_value=report)
        self.assertEqual(main(["validate", "--config", self.config_path]), 1)

    def test_configuration_error(self):
        self.assertEqual(main(["validate"]), 2)
        self.assertEqual(main(["validate", "--config", str(self.tmp_path / "missing.json")]), 2)

    def test_numerical_abort(self):
        self.mocker.patch("sublaplacian_sdk.main.run", side_effect=DecompositionError("residual 1e-3"))
        self.assertEqual(main(["validate", "--config", self.config_path]), 3)

    def test_linear_algebra_failure(self):
        def rows(experiment):
            raise np.linalg.LinAlgError("Singular matrix")
            yield

        self.mocker.patch.object(ValidateExperiment, "rows", rows)
        self.assertEqual(main(["validate", "--config", self.config_path]), 3)

    def test_overrides(self):
        run_mock = self.mocker.patch("sublaplacian_sdk.main.run")
        run_mock.return_value.exit_code = 0

        main(["decompose", "--config", self.config_path, "--seed", "7", "--out", "elsewhere"])
        experiment_config = run_mock.call_args[0][0]

        self.assertEqual(experiment_config.experiment, "decompose")
        self.assertEqual(experiment_config.seed, 7)
        self.assertEqual(experiment_config.output, "elsewhere")
