"""Mini-batch training with early stopping on validation accuracy."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from app.data.samples import Sample, augment_rotations, conform, groups_of, stack_inputs
from app.errors import DivergenceError, LeakageError, TaskError, TrainingConfigError
from app.evaluation.tasks import THREE_CLASS, TaskSpec
from app.metrics.prometheus_exporter import training_epochs_total, training_samples_total
from app.model import Model, ModelConfig, build_model, loss_and_grads, predict
from app.optim import L2Config, nadam_step
from app.tensor import Prng, Stream
from app.training.config import TrainConfig

logger = logging.getLogger(__name__)


class StopReason(str, Enum):
    PATIENCE = "patience"
    MAX_EPOCHS = "max_epochs"


@dataclass(frozen=True, slots=True)
class EpochRecord:
    epoch: int
    train_loss: float
    data_loss: float
    train_accuracy: float
    val_accuracy: float

    def log_line(self) -> str:
        return (
            f"epoch={self.epoch} train_loss={self.train_loss:.6f} data_loss={self.data_loss:.6f} "
            f"train_acc={self.train_accuracy:.2f} val_acc={self.val_accuracy:.2f}"
        )


@dataclass(slots=True)
class TrainReport:
    config: TrainConfig
    network: ModelConfig
    task: TaskSpec
    train_samples: int
    val_samples: int
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = -1.0
    stop_reason: StopReason = StopReason.MAX_EPOCHS
    wall_time: float = 0.0

    def summary(self) -> str:
        """``key=value`` lines; wall time is left out so reruns compare byte for byte."""

        lines = [
            f"best_epoch={self.best_epoch}",
            f"best_val_acc={self.best_val_accuracy:.4f}",
            f"stop_reason={self.stop_reason.value}",
            f"epochs_run={len(self.epochs)}",
            f"task={self.task.name}",
            f"train_samples={self.train_samples}",
            f"val_samples={self.val_samples}",
        ]
        lines += [f"{key}={value}" for key, value in self.config.model_dump().items()]
        lines.append(f"model={self.network.model_dump_json()}")
        return "\n".join(lines) + "\n"

    def write(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "train_summary.txt"
        path.write_text(self.summary(), encoding="utf-8")
        return path


def infer_task(num_classes: int, samples: Sequence[Sample]) -> TaskSpec:
    """Three-class task, or the pair spanned by the labels present in ``samples``."""

    if num_classes == 3:
        return THREE_CLASS
    present = sorted({sample.label for sample in samples}, key=lambda label: label.index)
    if len(present) != 2:
        raise TaskError(f"a 2-class model needs samples from exactly two classes, found {len(present)}")
    return TaskSpec.pair(*present)


def _targets(samples: Sequence[Sample], task: TaskSpec) -> np.ndarray:
    return np.array([task.local_index(sample.label) for sample in samples], dtype=np.int64)


def _val_accuracy(model: Model, inputs: np.ndarray, targets: np.ndarray) -> float:
    return 100.0 * float(np.mean(predict(model, inputs) == targets))


def train(
    config: ModelConfig,
    tc: TrainConfig,
    train_set: Sequence[Sample],
    val_set: Sequence[Sample],
    *,
    task: TaskSpec | None = None,
) -> tuple[Model, TrainReport]:
    """Train from scratch and return the weights of the best validation epoch.

    Stops once validation accuracy has not strictly improved for
    ``tc.patience_epochs`` consecutive epochs, or after ``tc.max_epochs``.
    """

    if not train_set:
        raise TrainingConfigError("training set is empty")
    if not val_set:
        raise TrainingConfigError("validation set is empty; early stopping needs one")
    shared = groups_of(train_set) & groups_of(val_set)
    if shared:
        raise LeakageError(f"group {sorted(shared)[0]} is in both training and validation")

    task = task or infer_task(config.num_classes, [*train_set, *val_set])
    if task.num_classes != config.num_classes:
        raise TaskError(f"task {task.name} has {task.num_classes} classes, model has {config.num_classes}")
    network = config.model_copy(
        update={
            "seed": tc.seed,
            "dropout_rate": tc.dropout_rate,
            "sharpen": tc.sharpen,
            "class_names": tuple(label.value for label in task.classes),
        }
    )

    sources = augment_rotations(train_set) if tc.rotations else list(train_set)
    train_ready = conform(sources, network.input_size, network.sharpen)
    val_ready = conform(val_set, network.input_size, network.sharpen)
    x_train, y_train = stack_inputs(train_ready), _targets(train_ready, task)
    x_val, y_val = stack_inputs(val_ready), _targets(val_ready, task)

    model = build_model(network, lr=tc.lr)
    l2 = L2Config(lam=tc.l2_lambda)
    shuffle_rng = Prng(tc.seed, Stream.SHUFFLE)
    dropout_rng = Prng(tc.seed, Stream.DROPOUT)
    report = TrainReport(config=tc, network=network, task=task, train_samples=len(y_train), val_samples=len(y_val))
    best_params = model.snapshot()
    stale = 0
    started = time.perf_counter()
    n = len(y_train)

    for epoch in range(1, tc.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        total_loss = data_loss = 0.0
        correct = 0
        for batch, start in enumerate(range(0, n, tc.batch_size)):
            index = order[start : start + tc.batch_size]
            result = loss_and_grads(model, x_train[index], y_train[index], l2, dropout_rng)
            if not math.isfinite(result.total):
                raise DivergenceError(
                    f"loss became {result.total} at epoch {epoch}, batch {batch}; try a lower learning rate"
                )
            nadam_step(model.params, result.grads, model.optimizer)
            total_loss += result.total * len(index)
            data_loss += result.data * len(index)
            correct += int(np.sum(np.argmax(result.probs, axis=-1) == y_train[index]))

        record = EpochRecord(
            epoch=epoch,
            train_loss=total_loss / n,
            data_loss=data_loss / n,
            train_accuracy=100.0 * correct / n,
            val_accuracy=_val_accuracy(model, x_val, y_val),
        )
        report.epochs.append(record)
        training_epochs_total.inc()
        training_samples_total.inc(n)
        logger.info(record.log_line())

        if record.val_accuracy > report.best_val_accuracy:
            report.best_val_accuracy = record.val_accuracy
            report.best_epoch = epoch
            best_params = model.snapshot()
            stale = 0
        else:
            stale += 1
            if stale >= tc.patience_epochs:
                report.stop_reason = StopReason.PATIENCE
                break

    model.restore(best_params)
    report.wall_time = time.perf_counter() - started
    logger.info(
        "Stopped after %d epochs (%s); best epoch %d at %.2f%%",
        len(report.epochs),
        report.stop_reason.value,
        report.best_epoch,
        report.best_val_accuracy,
    )
    return model, report
