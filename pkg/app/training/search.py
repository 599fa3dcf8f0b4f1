"""Random topology search scored by cross-validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from app.data.samples import Sample
from app.errors import SearchError, TopologyError
from app.evaluation.tasks import TaskSpec
from app.model import ConvSpec, DenseSpec, FlattenSpec, ModelConfig, PoolSpec, param_count, shape_chain
from app.model.config import LayerSpec
from app.tensor import Prng, Stream
from app.training.config import SearchSpace, TrainConfig
from app.training.crossval import cross_validate

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


@dataclass(frozen=True, slots=True)
class SearchResult:
    config: ModelConfig
    mean_accuracy: float
    fold_accuracies: tuple[float, ...]
    params: int


def sample_config(space: SearchSpace, rng: Prng, num_classes: int, seed: int = 0) -> ModelConfig | None:
    """One uniform draw from ``space``; ``None`` when the drawn layers do not chain."""

    conv_layers = rng.integers(*space.conv_layers)
    use_pool = space.use_maxpool[rng.integers(0, len(space.use_maxpool) - 1)]
    input_size = rng.integers(*space.input_size)

    layers: list[LayerSpec] = []
    for position in range(conv_layers):
        filters = rng.integers(*space.filters_at(position))
        kernel = rng.integers(*space.kernel_at(position))
        layers.append(ConvSpec(filters=filters, kernel=(kernel, kernel)))
        if use_pool:
            layers.append(PoolSpec())
    layers.append(FlattenSpec())
    for position in range(rng.integers(*space.fc_layers)):
        layers.append(DenseSpec(units=rng.integers(*space.fc_size_at(position))))
    layers.append(DenseSpec(units=num_classes))

    config = ModelConfig(input_size=input_size, layers=tuple(layers), num_classes=num_classes, seed=seed)
    try:
        shape_chain(config)
    except TopologyError:
        return None
    return config


def _draw(space: SearchSpace, rng: Prng, num_classes: int, seed: int) -> ModelConfig:
    for _ in range(MAX_ATTEMPTS):
        config = sample_config(space, rng, num_classes, seed)
        if config is not None:
            return config
    raise SearchError(f"no valid topology found in {MAX_ATTEMPTS} draws; widen the input size or shrink the kernels")


def topology_search(
    space: SearchSpace,
    tc: TrainConfig,
    dataset: Sequence[Sample],
    budget: int,
    seed: int,
    *,
    num_classes: int = 3,
    k: int = 10,
    task: TaskSpec | None = None,
    threads: int | None = None,
) -> list[SearchResult]:
    """Cross-validate ``budget`` sampled topologies; best mean accuracy first, ties to fewer parameters."""

    if budget < 1:
        raise SearchError(f"budget must be >= 1, got {budget}")
    rng = Prng(seed, Stream.SEARCH)
    results: list[SearchResult] = []
    for candidate in range(1, budget + 1):
        config = _draw(space, rng, num_classes, tc.seed)
        cv = cross_validate(config, tc, dataset, k, task=task, threads=threads)
        results.append(
            SearchResult(
                config=config,
                mean_accuracy=cv.mean_accuracy,
                fold_accuracies=cv.fold_accuracies,
                params=param_count(config),
            )
        )
        logger.info("Candidate %d/%d: %.2f%% (%d parameters)", candidate, budget, cv.mean_accuracy, results[-1].params)
    return sorted(results, key=lambda result: (-result.mean_accuracy, result.params))
