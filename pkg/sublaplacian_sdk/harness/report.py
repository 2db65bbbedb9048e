import glob
import json
import logging
import os
from typing import Any, Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from sublaplacian_sdk.exceptions import ConfigurationError  # noqa: E402
from sublaplacian_sdk.harness.experiment import read_csv  # noqa: E402
from sublaplacian_sdk.methods.typing import BundleSummary, Verdict  # noqa: E402

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.txt"


def _load_sidecars(output_dir: str) -> Dict[str, Dict[str, Any]]:
    """
    Latest sidecar per experiment name, ordered by provenance timestamp then file time.
    """
    latest: Dict[str, Dict[str, Any]] = {}

    for path in sorted(glob.glob(os.path.join(output_dir, "*.json"))):
        try:
            with open(path, encoding="utf-8") as file:
                sidecar = json.load(file)
        except (OSError, json.JSONDecodeError) as error:
            logger.warning("Skipping unreadable result `%s`: %s", path, error)
            continue

        if not isinstance(sidecar, dict) or "experiment" not in sidecar or "verdicts" not in sidecar:
            continue
        if sidecar["experiment"] == "report":
            continue

        sidecar["_path"] = path
        sidecar["_order"] = (sidecar.get("provenance", {}).get("timestamp", ""), os.path.getmtime(path))
        name = sidecar["experiment"]

        if name in latest:
            newer, older = sorted((latest[name], sidecar), key=lambda item: item["_order"], reverse=True)
            logger.warning(
                "Two results for `%s`: keeping `%s`, ignoring `%s`",
                name,
                os.path.basename(newer["_path"]),
                os.path.basename(older["_path"]),
            )
            latest[name] = newer
        else:
            latest[name] = sidecar

    return latest


def _csv_rows(output_dir: str, sidecar: Dict[str, Any]) -> List[Dict[str, str]]:
    name = sidecar.get("csv")
    path = os.path.join(output_dir, name) if name else None
    if not path or not os.path.exists(path):
        return []
    return read_csv(path)


def _floats(rows: List[Dict[str, str]], column: str) -> List[float]:
    return [float(row[column]) if row.get(column) else float("nan") for row in rows]


def _plot_cluster_scan(rows: List[Dict[str, str]], path: str):
    ks = _floats(rows, "K")
    exact = _floats(rows, "norm_exact_1to2")
    lower = _floats(rows, "norm_lower_p")
    values = lower if any(value == value for value in lower) else exact

    points = [(K + 1, value) for K, value in zip(ks, values) if value == value and value > 0]
    if not points:
        return False

    figure, axis = plt.subplots(figsize=(6, 4))
    axis.loglog([x for x, _ in points], [y for _, y in points], "o", markersize=3)
    axis.set_xlabel("K + 1")
    axis.set_ylabel("cluster norm")
    axis.grid(True, which="both", alpha=0.3)
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)
    return True


def _plot_restriction_scan(rows: List[Dict[str, str]], path: str):
    ells = _floats(rows, "ell")
    norms = _floats(rows, "kernel_l2_norm")
    predicted = _floats(rows, "predicted_scale")
    if not ells:
        return False

    figure, axis = plt.subplots(figsize=(6, 4))
    axis.semilogy(ells, norms, "o-", label="kernel L2 norm")
    axis.semilogy(ells, predicted, "--", label="dyadic scaling")
    axis.set_xlabel("ell")
    axis.set_ylabel("norm")
    axis.legend()
    axis.grid(True, which="both", alpha=0.3)
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)
    return True


PLOTTERS = {
    "cluster-scan": _plot_cluster_scan,
    "restriction-scan": _plot_restriction_scan,
}


def report_bundle(output_dir: str) -> BundleSummary:
    """
    Aggregates the verdicts of every experiment result in `output_dir` into summary.txt,
    with a log-log plot of cluster norms and a plot of kernel norms against ell.
    """
    if not os.path.isdir(output_dir):
        raise ConfigurationError(f"Result directory `{output_dir}` does not exist.")

    sidecars = _load_sidecars(output_dir)
    if not sidecars:
        raise ConfigurationError(f"Result directory `{output_dir}` holds no experiment results.")

    verdicts: List[Verdict] = []
    failing: List[Verdict] = []
    lines = []
    plots = []

    for name in sorted(sidecars):
        sidecar = sidecars[name]
        for verdict in sidecar["verdicts"]:
            qualified = Verdict(
                criterion=f"{name}/{verdict['criterion']}",
                passed=bool(verdict["passed"]),
                observed=verdict["observed"],
                expected=verdict["expected"],
            )
            verdicts.append(qualified)
            if not qualified["passed"]:
                failing.append(qualified)
            lines.append(f"  {'PASS' if qualified['passed'] else 'FAIL'}  {qualified['criterion']}")

        if name in PLOTTERS:
            path = os.path.join(output_dir, f"{name}.png")
            if PLOTTERS[name](_csv_rows(output_dir, sidecar), path):
                plots.append(path)

    passed = len(verdicts) - len(failing)
    text = [f"{passed}/{len(verdicts)} criteria pass", ""] + lines

    if failing:
        text += ["", "Failing criteria:"]
        text += [
            f"  {verdict['criterion']}: observed {verdict['observed']}, expected {verdict['expected']}"
            for verdict in failing
        ]

    text = "\n".join(text) + "\n"
    with open(os.path.join(output_dir, SUMMARY_FILE), "w", encoding="utf-8") as file:
        file.write(text)

    return BundleSummary(text=text, passed=passed, total=len(verdicts), failing=failing, plots=plots)
