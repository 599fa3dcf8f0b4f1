"""Plain-text reports and the confusion-matrix / accuracy files written by ``eval``."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from app.errors import TaskError
from app.evaluation.confusion import ConfusionMatrix, accuracy, format_accuracy
from app.evaluation.fixtures import EXPERT_TABLE, FixtureResult
from app.evaluation.tasks import TaskSpec

REPORT_HEADER = "Classification accuracy"


def _matrix_lines(cm: ConfusionMatrix) -> list[str]:
    names = [label.value for label in cm.task.classes]
    width = max(6, *(len(str(v)) for v in cm.counts.flat))
    lines = ["pred \\ true".ljust(12) + "".join(name.rjust(width + 2) for name in names)]
    for name, row in zip(names, cm.counts):
        lines.append(name.ljust(12) + "".join(str(int(v)).rjust(width + 2) for v in row))
    return lines


def render_report(matrices: Sequence[tuple[str, ConfusionMatrix]]) -> str:
    """Accuracy rows followed by each confusion matrix (predicted rows, true columns)."""

    lines = [REPORT_HEADER, "=" * len(REPORT_HEADER)]
    for label, cm in matrices:
        value = format_accuracy(accuracy(cm)) if cm.total else "n/a"
        lines.append(f"{label:<24}{cm.task.title:<12}{value:>8}")
    for label, cm in matrices:
        lines += ["", f"{label}: {cm.task.title} (total {cm.total})"]
        lines += _matrix_lines(cm)
    return "\n".join(lines) + "\n"


def accuracy_summary(matrices: Sequence[tuple[str, ConfusionMatrix]]) -> str:
    """``<label>.<task>=<accuracy>`` lines with two decimals."""

    lines = []
    for label, cm in matrices:
        if cm.total:
            lines.append(f"{label}.{cm.task.name}={format_accuracy(accuracy(cm))}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_fixtures(result: FixtureResult) -> str:
    lines = ["Published table consistency", "---------------------------"]
    for check in result.checks:
        status = "ok" if check.matches else "MISMATCH"
        lines.append(
            f"{check.column:<8}{check.task.title:<12}recomputed {format_accuracy(check.recomputed):>6}"
            f"  published {format_accuracy(check.published):>6}  {status}"
        )
    for check in result.discrepancies:
        lines.append(
            f"warning: {check.column} {check.task.title} table value {format_accuracy(check.published)} "
            f"disagrees with its confusion matrix ({format_accuracy(check.recomputed)})"
        )
    lines += ["", "Network (rotations + sharpening) vs best expert, pooled two-proportion test"]
    for sig in result.significance:
        verdict = "significant" if sig.test.significant() else "comparable"
        lines.append(
            f"{sig.task.title:<12}expert {format_accuracy(sig.expert):>6}  cnn {format_accuracy(sig.cnn):>6}"
            f"  z={sig.test.z:+.2f}  p={sig.test.p_value:.2e}  {verdict}"
        )
    lines += ["", "Expert averages (need per-rater sheets to recompute)"]
    for task, row in EXPERT_TABLE.items():
        lines.append(f"{task.title:<12}average {format_accuracy(row['average']):>6}  best {format_accuracy(row['best']):>6}")
    return "\n".join(lines) + "\n"


def write_confusion(cm: ConfusionMatrix, path: Path) -> None:
    """Tab-separated matrix with a ``pred\\true`` header row."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [label.value for label in cm.task.classes]
    rows = ["pred\\true\t" + "\t".join(names)]
    rows += [name + "\t" + "\t".join(str(int(v)) for v in row) for name, row in zip(names, cm.counts)]
    path.write_text(f"# task: {cm.task.name}\n" + "\n".join(rows) + "\n", encoding="utf-8")


def read_confusion(path: Path) -> ConfusionMatrix:
    path = Path(path)
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines or not lines[0].startswith("# task:"):
        raise TaskError(f"{path}: missing '# task:' header")
    task = TaskSpec.parse(lines[0].split(":", 1)[1])
    try:
        rows = [[int(v) for v in line.split("\t")[1:]] for line in lines[2:]]
    except ValueError as exc:
        raise TaskError(f"{path}: non-integer count") from exc
    return ConfusionMatrix(task, np.asarray(rows, dtype=np.int64))
