import csv
import hashlib
import json
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy

from sublaplacian_sdk import config
from sublaplacian_sdk.exceptions import ConfigurationError
from sublaplacian_sdk.methods.typing import Verdict

VERSION = "1.0.0"

EXPERIMENT_NAMES = (
    "validate",
    "decompose",
    "spectrum",
    "cluster-scan",
    "heat-check",
    "restriction-scan",
    "report",
)


@dataclass
class ExperimentConfig:
    """
    One experiment run: group, experiment name, its parameters and the output directory.

    Upper case parameters matching a name in `config` override that setting for the run.
    """

    group: Union[str, Dict[str, Any], None]
    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    output: str = "results"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_NAMES:
            raise ConfigurationError(
                f"Unknown experiment `{self.experiment}`. Expected one of: {', '.join(EXPERIMENT_NAMES)}."
            )
        if self.group is None and self.experiment != "report":
            raise ConfigurationError(f"Experiment `{self.experiment}` requires a `group`.")
        if not isinstance(self.parameters, dict):
            raise ConfigurationError(f"`parameters` should be an object. Got {type(self.parameters).__name__}.")

        self.seed = config.DEFAULT_SEED if self.seed is None else self.seed
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigurationError(f"`seed` should be an integer. Got {self.seed!r}.")

        for key, value in self.parameters.items():
            if key.lower().endswith("tol") and not (isinstance(value, (int, float)) and value > 0):
                raise ConfigurationError(f"Tolerance `{key}` should be positive. Got {value!r}.")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigurationError(f"Experiment config should be an object. Got {type(data).__name__}.")
        if "experiment" not in data:
            raise ConfigurationError("Experiment config is missing fields: experiment")

        parameters = dict(data.get("parameters") or {})
        seed = data.get("seed", parameters.pop("seed", None))

        return cls(
            group=data.get("group"),
            experiment=data["experiment"],
            parameters=parameters,
            output=data.get("output", "results"),
            seed=seed,
        )

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as file:
                data = json.load(file)
        except json.JSONDecodeError as error:
            raise ConfigurationError(
                f"Config `{path}` is not valid JSON: {error.msg} (line {error.lineno}, column {error.colno})"
            )
        except OSError as error:
            raise ConfigurationError(f"Can not read config `{path}`: {error}")

        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group,
            "experiment": self.experiment,
            "parameters": self.parameters,
            "output": self.output,
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        """
        sha256 of the canonical JSON form, stable under key reordering. The output directory
        is not part of the identity of a run.
        """
        payload = {key: value for key, value in self.to_dict().items() if key != "output"}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def config_overrides(self) -> Dict[str, Any]:
        return {key: value for key, value in self.parameters.items() if key.isupper() and hasattr(config, key)}

    def stem(self) -> str:
        return f"{self.experiment}-{self.config_hash()[:8]}"


@dataclass
class ExperimentReport:
    experiment: str
    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]]
    verdicts: List[Verdict]
    provenance: Dict[str, Any]
    csv_path: Optional[str] = None
    sidecar_path: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(verdict["passed"] for verdict in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "columns": list(self.columns),
            "csv": os.path.basename(self.csv_path) if self.csv_path else None,
            "verdicts": self.verdicts,
            "provenance": self.provenance,
        }


def make_verdict(criterion: str, passed: bool, observed: Any, expected: Any) -> Verdict:
    return Verdict(criterion=criterion, passed=bool(passed), observed=str(observed), expected=str(expected))


def format_value(value: Any) -> str:
    """
    Floats with 17 significant digits, so that the CSV round-trips.
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


class CsvWriter:
    """
    Writes a fixed header, then one row per `write`, flushing after every row.
    """

    def __init__(self, path: str, columns: Sequence[str]):
        self.path = path
        self.columns = list(columns)
        self._file = open(path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(self.columns)
        self._file.flush()

    def write(self, row: Dict[str, Any]):
        self._writer.writerow([format_value(row.get(column)) for column in self.columns])
        self._file.flush()

    def close(self):
        self._file.close()

    def __enter__(self) -> "CsvWriter":
        return self

    def __exit__(self, *args):
        self.close()


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as file:
        return list(csv.DictReader(file))


def provenance(experiment_config: ExperimentConfig) -> Dict[str, Any]:
    return {
        "config_hash": experiment_config.config_hash(),
        "config": experiment_config.to_dict(),
        "seed": experiment_config.seed,
        "versions": {
            "sublaplacian_sdk": VERSION,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "timestamp": datetime.now(timezone.utc).replace(microsecond=0).isoformat(),
    }


def write_sidecar(report: ExperimentReport, path: str):
    with open(path, "w", encoding="utf-8") as file:
        json.dump(report.to_dict(), file, indent=2, sort_keys=True)
    report.sidecar_path = path
