"""Group-aware k-fold cross-validation; folds train concurrently in worker threads."""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import Sequence

from app.config.settings import get_settings
from app.data.samples import Sample
from app.data.splits import kfold
from app.evaluation.tasks import TaskSpec
from app.metrics.prometheus_exporter import validation_accuracy_percent
from app.model import ModelConfig
from app.tensor import Stream, derive_seed
from app.training.config import TrainConfig
from app.training.loop import TrainReport, infer_task, train

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class CrossValidationResult:
    mean_accuracy: float
    fold_accuracies: tuple[float, ...]
    reports: tuple[TrainReport, ...]


def fold_seed(seed: int, k: int, fold: int) -> int:
    return derive_seed(seed, Stream.FOLD, k, fold)


def _train_fold(
    config: ModelConfig,
    tc: TrainConfig,
    folds: list[list[Sample]],
    index: int,
    task: TaskSpec,
) -> TrainReport:
    held_out = folds[index]
    rest = [sample for i, fold in enumerate(folds) if i != index for sample in fold]
    fold_tc = tc.model_copy(update={"seed": fold_seed(tc.seed, len(folds), index)})
    _, report = train(config, fold_tc, rest, held_out, task=task)
    logger.info("Fold %d/%d: best validation accuracy %.2f%%", index + 1, len(folds), report.best_val_accuracy)
    return report


async def cross_validate_async(
    config: ModelConfig,
    tc: TrainConfig,
    dataset: Sequence[Sample],
    k: int = 10,
    *,
    task: TaskSpec | None = None,
    threads: int | None = None,
) -> CrossValidationResult:
    """Each fold serves once as validation set and early-stopping monitor for a model trained on the rest."""

    folds = kfold(dataset, k, tc.seed)
    task = task or infer_task(config.num_classes, dataset)
    limit = asyncio.Semaphore(max(1, threads or get_settings().threads))

    async def _run(index: int) -> TrainReport:
        async with limit:
            return await asyncio.to_thread(_train_fold, config, tc, folds, index, task)

    reports = await asyncio.gather(*(_run(index) for index in range(k)))
    accuracies = tuple(report.best_val_accuracy for report in reports)
    result = CrossValidationResult(
        mean_accuracy=sum(accuracies) / len(accuracies),
        fold_accuracies=accuracies,
        reports=tuple(reports),
    )
    # set after gather; folds finish in scheduling order
    validation_accuracy_percent.set(result.mean_accuracy)
    return result


def cross_validate(
    config: ModelConfig,
    tc: TrainConfig,
    dataset: Sequence[Sample],
    k: int = 10,
    *,
    task: TaskSpec | None = None,
    threads: int | None = None,
) -> CrossValidationResult:
    return asyncio.run(cross_validate_async(config, tc, dataset, k, task=task, threads=threads))
