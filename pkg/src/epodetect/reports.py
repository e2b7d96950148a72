"""Machine-readable report files: screen JSON/CSV, evaluation JSON, ROC CSV.

Reports are data first; any human-readable rendering is derived from the same
dictionaries. Files are written atomically (temp file + rename) and contain
no timestamps, so identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .evaluation import SOTA_BASELINE, CrossValidation, EvaluationResult, RocCurve
from .profiles import Altitude, Cohort, Label, PARAMETERS
from .screening import ParameterScreen, parameter_values, summarize


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json_atomic(path: str | Path, payload: dict) -> None:
    write_text_atomic(path, json.dumps(payload, indent=2) + "\n")


def counts_by_group(cohort: Cohort) -> dict:
    counts = {}
    for altitude in Altitude:
        counts[altitude.value] = {
            "control": cohort.count(altitude, Label.CONTROL),
            "rhepo": cohort.count(altitude, Label.RHEPO),
        }
        counts[altitude.value]["total"] = (
            counts[altitude.value]["control"] + counts[altitude.value]["rhepo"]
        )
    return counts


def render_counts_table(counts: dict) -> str:
    """Sample counts in the familiar two-column study layout."""
    rows = [
        ("Blood samples", "Sea-level", "High altitude"),
        ("Controlled samples", str(counts["sea"]["control"]), str(counts["alt"]["control"])),
        ("rhEPO samples", str(counts["sea"]["rhepo"]), str(counts["alt"]["rhepo"])),
        ("Total samples", str(counts["sea"]["total"]), str(counts["alt"]["total"])),
    ]
    widths = [max(len(row[col]) for row in rows) for col in range(3)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[col]) for col, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 4))
    return "\n".join(lines)


def screen_report(screen: ParameterScreen, seed: int) -> dict:
    params = {
        name: {
            "d": result.d_statistic,
            "p": result.p_value,
            "critical": result.critical_value,
            "reject": result.reject,
        }
        for name, result in screen.results.items()
    }
    any_result = next(iter(screen.results.values()))
    return {
        "alpha": screen.alpha,
        "altitude": screen.altitude.value if screen.altitude else None,
        "n_control": any_result.n_a,
        "n_rhepo": any_result.n_b,
        "seed": seed,
        "parameters": params,
        "selected": list(screen.selected),
    }


def screen_table_csv(screen: ParameterScreen, cohort: Cohort) -> str:
    """Flat CSV mirroring the per-group summary table layout, one parameter
    per row, with the test columns appended for diffing."""
    sub = cohort.at_altitude(screen.altitude) if screen.altitude else cohort
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["parameter"]
    for group in ("rhepo", "control"):
        header += [f"{group}_{stat}" for stat in ("mean", "std", "min", "iq1", "median", "iq3", "max")]
    header += ["d", "p_value", "critical", "reject"]
    writer.writerow(header)
    for param in PARAMETERS:
        result = screen.results[param.name]
        row = [param.name]
        for label in (Label.RHEPO, Label.CONTROL):
            stats = summarize(parameter_values(sub, param.name, label))
            row += [
                repr(stats.mean),
                repr(stats.std),
                repr(stats.min),
                repr(stats.iq1),
                repr(stats.median),
                repr(stats.iq3),
                repr(stats.max),
            ]
        row += [
            repr(result.d_statistic),
            repr(result.p_value),
            repr(result.critical_value),
            str(result.reject).lower(),
        ]
        writer.writerow(row)
    return out.getvalue()


def roc_csv(roc: RocCurve) -> str:
    """ROC operating points as (threshold, fpr, tpr) rows; the initial (0, 0)
    point carries an infinite threshold."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("threshold", "fpr", "tpr"))
    writer.writerow(("inf", "0.0", "0.0"))
    for threshold, fpr, tpr in zip(roc.thresholds, roc.fpr[1:], roc.tpr[1:]):
        writer.writerow((repr(float(threshold)), repr(float(fpr)), repr(float(tpr))))
    return out.getvalue()


def _metrics_dict(result: EvaluationResult) -> dict:
    report = result.metrics
    out = {
        "accuracy": report.accuracy,
        "f1": report.f1,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "auc": result.auc,
    }
    # The alternative F1 print P*R/(P+R) seen in some reports is half the
    # harmonic mean; noted alongside whenever it differs.
    if report.f1:
        out["f1_variant_pr_over_sum"] = report.f1 / 2.0
    out["precision"] = report.precision
    out["youden_threshold"] = result.youden_threshold
    out["youden_j"] = result.youden_j
    return out


def evaluation_report(
    per_model_test: dict[str, EvaluationResult],
    per_model_cv: dict[str, CrossValidation],
    config: dict,
) -> dict:
    """Model comparison rows in the published table layout, carrying both the
    held-out test metrics and the cross-validation means, plus the fixed
    prior-art baseline row."""
    rows: dict[str, dict] = {
        "SOTA": {
            "accuracy": None,
            "f1": None,
            "sensitivity": SOTA_BASELINE["sensitivity"],
            "specificity": SOTA_BASELINE["specificity"],
            "auc": SOTA_BASELINE["auc"],
        }
    }
    for name, result in per_model_test.items():
        rows[name] = _metrics_dict(result)
    cv_rows = {
        name: {"k": cv.k, **cv.mean_metrics()} for name, cv in per_model_cv.items()
    }
    return {"config": config, "test_split": rows, "cross_validation": cv_rows}


_MODEL_ROW_ORDER = ("SOTA", "svc", "rf", "boost")
_REPORT_METRICS = ("accuracy", "f1", "sensitivity", "specificity", "auc")


def render_evaluation_table(report: dict) -> str:
    """Human-readable rendering of the evaluation report JSON."""

    def fmt(value) -> str:
        return "-" if value is None else f"{value:.2f}"

    names = [n for n in _MODEL_ROW_ORDER if n in report["test_split"]]
    lines = ["Metric".ljust(12) + "".join(n.ljust(9) for n in names)]
    lines.append("-" * (12 + 9 * len(names)))
    for metric in _REPORT_METRICS:
        cells = [fmt(report["test_split"][n].get(metric)) for n in names]
        lines.append(metric.ljust(12) + "".join(c.ljust(9) for c in cells))
    return "\n".join(lines)
