"""Expert rater sheets, majority voting and the per-task expert summary."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from app.data.labels import ClassLabel
from app.errors import LabelError, SheetError
from app.evaluation.confusion import ConfusionMatrix, accuracy
from app.evaluation.tasks import TaskSpec

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class RaterSheet:
    """One rater's answers: ``labels[sample_id][task name]``."""

    rater_id: str
    labels: dict[str, dict[str, ClassLabel]] = field(default_factory=dict)

    def answers(self, task: TaskSpec) -> dict[str, ClassLabel]:
        return {sample_id: tasks[task.name] for sample_id, tasks in self.labels.items() if task.name in tasks}


def parse_sheets(text: str, *, source: str = "<sheets>") -> list[RaterSheet]:
    """Parse ``sample_id  task  rater_id  label`` lines; raters keep first-appearance order."""

    sheets: dict[str, RaterSheet] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        fields = [f.strip() for f in raw.split("\t")]
        if len(fields) != 4:
            raise SheetError(f"{source}:{lineno}: expected 4 tab-separated fields, got {len(fields)}")
        sample_id, task_raw, rater_id, label_raw = fields
        try:
            task = TaskSpec.parse(task_raw)
            label = ClassLabel.parse(label_raw)
        except ValueError as exc:
            raise SheetError(f"{source}:{lineno}: {exc}") from exc
        if not task.includes(label):
            raise SheetError(f"{source}:{lineno}: label {label.value} is not a class of task {task.name}")
        sheet = sheets.setdefault(rater_id, RaterSheet(rater_id))
        sheet.labels.setdefault(sample_id, {})[task.name] = label
    return list(sheets.values())


def read_sheets(path: Path) -> list[RaterSheet]:
    path = Path(path)
    return parse_sheets(path.read_text(encoding="utf-8"), source=str(path))


def _covered_answers(sheets: Sequence[RaterSheet], task: TaskSpec) -> list[dict[str, ClassLabel]]:
    if len(sheets) < 2:
        raise SheetError(f"majority voting needs at least 2 raters, got {len(sheets)}")
    answers = [sheet.answers(task) for sheet in sheets]
    reference = set(answers[0])
    for sheet, given in zip(sheets[1:], answers[1:]):
        if set(given) != reference:
            missing = sorted(reference ^ set(given))
            raise SheetError(
                f"rater {sheet.rater_id} does not cover the same samples for {task.name} "
                f"(first difference: {missing[0]})"
            )
    return answers


def majority_vote(sheets: Sequence[RaterSheet], task: TaskSpec) -> dict[str, ClassLabel]:
    """Modal label per sample; ties go to the earliest rater whose label is among the modes."""

    answers = _covered_answers(sheets, task)
    voted: dict[str, ClassLabel] = {}
    for sample_id in answers[0]:
        votes = [given[sample_id] for given in answers]
        tally = Counter(votes)
        top = max(tally.values())
        voted[sample_id] = next(label for label in votes if tally[label] == top)
    return voted


def labels_matrix(
    predicted: Mapping[str, ClassLabel], truth: Mapping[str, ClassLabel], task: TaskSpec
) -> ConfusionMatrix:
    """Confusion matrix over samples with a known true class; out-of-task true classes are ignored."""

    missing = [sample_id for sample_id in predicted if sample_id not in truth]
    if missing:
        raise SheetError(f"no true class for sample {missing[0]}")
    ids = list(predicted)
    return ConfusionMatrix.from_labels(task, [predicted[i] for i in ids], [truth[i] for i in ids])


@dataclass(frozen=True, slots=True)
class ExpertSummary:
    task: TaskSpec
    per_rater: dict[str, float]
    average: float
    best: float
    voting: float
    voting_matrix: ConfusionMatrix


def expert_summary(
    sheets: Sequence[RaterSheet], truth: Mapping[str, ClassLabel], task: TaskSpec
) -> ExpertSummary:
    """Average rater accuracy, best rater accuracy and majority-vote accuracy for one task."""

    _covered_answers(sheets, task)
    per_rater = {sheet.rater_id: accuracy(labels_matrix(sheet.answers(task), truth, task)) for sheet in sheets}
    voting_matrix = labels_matrix(majority_vote(sheets, task), truth, task)
    summary = ExpertSummary(
        task=task,
        per_rater=per_rater,
        average=sum(per_rater.values()) / len(per_rater),
        best=max(per_rater.values()),
        voting=accuracy(voting_matrix),
        voting_matrix=voting_matrix,
    )
    logger.info(
        "Experts on %s: average %.2f, best %.2f, voting %.2f", task.name, summary.average, summary.best, summary.voting
    )
    return summary


def parse_truth(text: str, *, source: str = "<truth>") -> dict[str, ClassLabel]:
    """``sample_id  label`` lines giving the true class of each rated sample."""

    truth: dict[str, ClassLabel] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        fields = [f.strip() for f in raw.split("\t")]
        if len(fields) != 2:
            raise SheetError(f"{source}:{lineno}: expected sample_id and label")
        try:
            truth[fields[0]] = ClassLabel.parse(fields[1])
        except LabelError as exc:
            raise SheetError(f"{source}:{lineno}: {exc}") from exc
    return truth
