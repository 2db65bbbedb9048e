import argparse
import logging
import sys
from typing import List, Optional

from sublaplacian_sdk.exceptions import SubLaplacianException
from sublaplacian_sdk.harness import run
from sublaplacian_sdk.harness.experiment import EXPERIMENT_NAMES, ExperimentConfig

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sublaplacian",
        description="Spectral experiments for sub-Laplacians on two-step stratified groups.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_NAMES)
    parser.add_argument("--config", help="Experiment config (JSON)")
    parser.add_argument("--seed", type=int, help="Overrides the config seed")
    parser.add_argument("--out", help="Overrides the output directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {"experiment": args.experiment, "group": None}
    if args.config:
        experiment_config = ExperimentConfig.load(args.config)
        data = experiment_config.to_dict()
        if experiment_config.experiment != args.experiment:
            logger.warning(
                "Config names experiment `%s`, running `%s`", experiment_config.experiment, args.experiment
            )
            data["experiment"] = args.experiment

    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output"] = args.out

    return ExperimentConfig.from_dict(data)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        format="[%(module)-12s] %(message)s",
        level=logging.DEBUG if args.verbose else logging.INFO,
    )

    try:
        report = run(load_config(args))
    except SubLaplacianException as error:
        logger.error("%s: %s", type(error).__name__, error)
        return error.exit_code

    logger.info("%s %s", report.experiment, "passed" if report.passed else "failed")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
