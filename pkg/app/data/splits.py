"""Group-aware, label-stratified splitting and k-fold partitioning.

All operations treat a rotation group as one unit and are deterministic
functions of the input order and the seed.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from typing import Sequence

from app.data.labels import ClassLabel
from app.data.samples import Sample
from app.errors import FoldError, InvalidRangeError, ManifestError, StratificationError
from app.tensor import Prng, Stream

logger = logging.getLogger(__name__)


def _groups_by_label(samples: Sequence[Sample]) -> dict[ClassLabel, list[str]]:
    groups: dict[ClassLabel, set[str]] = defaultdict(set)
    for sample in samples:
        groups[sample.label].add(sample.group_id)
    return {label: sorted(groups[label]) for label in ClassLabel if label in groups}


def _shuffled(groups: list[str], rng: Prng) -> list[str]:
    return [groups[i] for i in rng.permutation(len(groups))]


def _partition(samples: Sequence[Sample], chosen: set[str]) -> tuple[list[Sample], list[Sample]]:
    rest = [s for s in samples if s.group_id not in chosen]
    picked = [s for s in samples if s.group_id in chosen]
    return rest, picked


def group_split(samples: Sequence[Sample], val_fraction: float, seed: int) -> tuple[list[Sample], list[Sample]]:
    """Per class, move ``round(groups * val_fraction)`` shuffled groups to validation.

    The count is clamped so both sides keep at least one group of every class.
    """

    if not 0.0 < val_fraction < 1.0:
        raise InvalidRangeError(f"val_fraction must be in (0, 1), got {val_fraction}")
    val_groups: set[str] = set()
    for label, groups in _groups_by_label(samples).items():
        if len(groups) < 2:
            raise StratificationError(f"class {label.value} has {len(groups)} group(s); at least 2 are needed")
        wanted = min(max(math.floor(len(groups) * val_fraction + 0.5), 1), len(groups) - 1)
        val_groups.update(_shuffled(groups, Prng(seed, Stream.SPLIT, label.index))[:wanted])
    train, val = _partition(samples, val_groups)
    logger.debug("Group split: %d train / %d validation samples", len(train), len(val))
    return train, val


def kfold(samples: Sequence[Sample], k: int, seed: int) -> list[list[Sample]]:
    """``k`` disjoint folds; each class's shuffled groups are dealt round-robin."""

    if k < 2:
        raise FoldError(f"k must be >= 2, got {k}")
    assignment: dict[str, int] = {}
    offset = 0
    for label, groups in _groups_by_label(samples).items():
        if len(groups) < k:
            raise FoldError(f"class {label.value} has {len(groups)} group(s); {k} folds need at least {k}")
        for position, group_id in enumerate(_shuffled(groups, Prng(seed, Stream.FOLD, label.index))):
            assignment[group_id] = (offset + position) % k
        offset += len(groups)
    folds: list[list[Sample]] = [[] for _ in range(k)]
    for sample in samples:
        folds[assignment[sample.group_id]].append(sample)
    return folds


def split_test(samples: Sequence[Sample], per_class: int, seed: int) -> tuple[list[Sample], list[Sample]]:
    """Hold out ``per_class`` source groups of every class as the test set, before any augmentation."""

    if per_class < 1:
        raise InvalidRangeError(f"per_class must be >= 1, got {per_class}")
    rotated = next((s for s in samples if s.rotation != 0), None)
    if rotated is not None:
        raise ManifestError(f"test hold-out must precede augmentation; {rotated.path or rotated.group_id} is rotated")
    test_groups: set[str] = set()
    for label, groups in _groups_by_label(samples).items():
        if len(groups) <= per_class:
            raise StratificationError(
                f"class {label.value} has {len(groups)} group(s); holding out {per_class} leaves none for training"
            )
        test_groups.update(_shuffled(groups, Prng(seed, Stream.HOLDOUT, label.index))[:per_class])
    return _partition(samples, test_groups)
