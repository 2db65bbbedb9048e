import logging
import os

import numpy as np

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import NumericalAbort, SubLaplacianException
from sublaplacian_sdk.harness.experiment import (
    CsvWriter,
    ExperimentConfig,
    ExperimentReport,
    make_verdict,
    provenance,
    write_sidecar,
)
from sublaplacian_sdk.harness.experiments import EXPERIMENTS, get_experiment
from sublaplacian_sdk.harness.report import report_bundle
from sublaplacian_sdk.methods.group import load_group

logger = logging.getLogger(__name__)


def run(experiment_config: ExperimentConfig) -> ExperimentReport:
    """
    Runs one experiment, writing `<experiment>-<hash8>.csv` row by row and a JSON sidecar
    with verdicts and provenance into the output directory.

    @return: Report whose exit_code is 0 iff every verdict passes.
    """
    overrides = experiment_config.config_overrides()
    saved = {key: getattr(config, key) for key in overrides}
    for key, value in overrides.items():
        setattr(config, key, value)

    try:
        return _run(experiment_config)
    finally:
        for key, value in saved.items():
            setattr(config, key, value)


def _run(experiment_config: ExperimentConfig) -> ExperimentReport:
    output = experiment_config.output
    os.makedirs(output, exist_ok=True)

    if experiment_config.experiment == "report":
        summary = report_bundle(experiment_config.parameters.get("input", output))
        logger.info("%s/%s criteria pass", summary["passed"], summary["total"])
        return ExperimentReport(
            experiment="report",
            columns=(),
            rows=[],
            verdicts=[
                make_verdict(
                    "bundle",
                    not summary["failing"],
                    f"{summary['passed']}/{summary['total']}",
                    "all criteria pass",
                )
            ],
            provenance=provenance(experiment_config),
        )

    spec = load_group(experiment_config.group)
    experiment = get_experiment(experiment_config.experiment)(
        spec, experiment_config.parameters, experiment_config.seed
    )

    stem = experiment_config.stem()
    csv_path = os.path.join(output, f"{stem}.csv")
    rows = []

    logger.info("Running %s on %s", experiment.name, spec.label or "inline group")
    with CsvWriter(csv_path, experiment.columns) as writer:
        index = -1
        try:
            for index, row in enumerate(experiment.rows()):
                writer.write(row)
                rows.append(row)
        except SubLaplacianException as error:
            raise type(error)(f"{error} [{experiment.name}, row {index + 2}]") from error
        except (np.linalg.LinAlgError, FloatingPointError) as error:
            raise NumericalAbort(f"{error} [{experiment.name}, row {index + 2}]") from error

    report = ExperimentReport(
        experiment=experiment.name,
        columns=experiment.columns,
        rows=rows,
        verdicts=experiment.verdicts(),
        provenance=provenance(experiment_config),
        csv_path=csv_path,
    )
    write_sidecar(report, os.path.join(output, f"{stem}.json"))

    for verdict in report.verdicts:
        logger.info(
            "%s %s: observed %s, expected %s",
            "PASS" if verdict["passed"] else "FAIL",
            verdict["criterion"],
            verdict["observed"],
            verdict["expected"],
        )

    return report
