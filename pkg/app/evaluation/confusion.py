"""Confusion matrices (rows predicted, columns true) and model evaluation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from app.data.labels import ClassLabel
from app.data.samples import Sample, conform, stack_inputs
from app.errors import DivisionError, TaskError
from app.evaluation.tasks import TaskSpec
from app.metrics.prometheus_exporter import evaluated_samples_total
from app.model import Model, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, eq=False)
class ConfusionMatrix:
    task: TaskSpec
    counts: np.ndarray

    def __post_init__(self) -> None:
        k = self.task.num_classes
        counts = np.asarray(self.counts)
        if counts.shape != (k, k):
            raise TaskError(f"task {self.task.name} needs a {k}x{k} matrix, got shape {counts.shape}")
        if (counts < 0).any():
            raise TaskError("confusion counts must be non-negative")

    @classmethod
    def empty(cls, task: TaskSpec) -> ConfusionMatrix:
        return cls(task, np.zeros((task.num_classes, task.num_classes), dtype=np.int64))

    @classmethod
    def from_rows(cls, task: TaskSpec, rows: Sequence[Sequence[int]]) -> ConfusionMatrix:
        return cls(task, np.asarray(rows, dtype=np.int64))

    @classmethod
    def from_labels(
        cls, task: TaskSpec, predicted: Iterable[ClassLabel], true: Iterable[ClassLabel]
    ) -> ConfusionMatrix:
        """Count (predicted, true) pairs; pairs whose true class is outside the task are ignored."""

        counts = np.zeros((task.num_classes, task.num_classes), dtype=np.int64)
        for guess, actual in zip(predicted, true, strict=True):
            if not task.includes(actual):
                continue
            counts[task.local_index(guess), task.local_index(actual)] += 1
        return cls(task, counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.counts))

    def per_class_totals(self) -> dict[ClassLabel, int]:
        column_sums = self.counts.sum(axis=0)
        return {label: int(column_sums[i]) for i, label in enumerate(self.task.classes)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.task == other.task and np.array_equal(self.counts, other.counts)


def accuracy(cm: ConfusionMatrix) -> float:
    """Percentage ``100 * trace / total`` (unrounded)."""

    if cm.total == 0:
        raise DivisionError(f"accuracy of an empty confusion matrix ({cm.task.name})")
    return 100.0 * cm.trace / cm.total


def format_accuracy(value: float) -> str:
    return f"{value:.2f}"


def check_model_task(model: Model, task: TaskSpec) -> None:
    config = model.config
    if config.num_classes != task.num_classes:
        raise TaskError(
            f"model has {config.num_classes} output units but task {task.name} has {task.num_classes} classes"
        )
    if config.class_names and tuple(config.class_names) != tuple(label.value for label in task.classes):
        raise TaskError(f"model was trained on classes {config.class_names}, not on task {task.name}")


def evaluate(model: Model, test_set: Sequence[Sample], task: TaskSpec, batch_size: int = 64) -> ConfusionMatrix:
    """Confusion matrix of ``model`` on the samples whose true class belongs to ``task``."""

    check_model_task(model, task)
    selected = [sample for sample in test_set if task.includes(sample.label)]
    if not selected:
        return ConfusionMatrix.empty(task)
    prepared = conform(selected, model.config.input_size, model.config.sharpen)
    indices = predict(model, stack_inputs(prepared), batch_size=batch_size)
    predicted = [task.classes[int(i)] for i in indices]
    cm = ConfusionMatrix.from_labels(task, predicted, [sample.label for sample in selected])
    evaluated_samples_total.labels(task=task.name).inc(cm.total)
    logger.info("Evaluated %d samples on %s: %.2f%%", cm.total, task.name, accuracy(cm))
    return cm
