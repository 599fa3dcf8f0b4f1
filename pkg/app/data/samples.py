"""In-memory samples and rotation augmentation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from app.data.labels import ClassLabel
from app.data.transforms import resize_square, rotate90, sharpen, to_input
from app.errors import DoubleAugmentationError, InvalidRangeError
from app.tensor import Tensor

logger = logging.getLogger(__name__)

ROTATIONS = (0, 90, 180, 270)


@dataclass(frozen=True, slots=True, eq=False)
class Sample:
    """One square 8-bit image; rotated copies share the source's ``group_id``."""

    image: np.ndarray
    label: ClassLabel
    group_id: str
    rotation: int = 0
    sharpened: bool = False
    path: str | None = None

    def __post_init__(self) -> None:
        if self.rotation not in ROTATIONS:
            raise InvalidRangeError(f"rotation must be one of {ROTATIONS}, got {self.rotation}")


def augment_rotations(samples: Iterable[Sample]) -> list[Sample]:
    """Each source followed by its 90°, 180° and 270° clockwise copies."""

    out: list[Sample] = []
    for sample in samples:
        if sample.rotation != 0:
            raise DoubleAugmentationError(
                f"sample {sample.path or sample.group_id} is already rotated by {sample.rotation} degrees"
            )
        out.append(sample)
        for quarter, degrees in enumerate(ROTATIONS[1:], start=1):
            out.append(replace(sample, image=rotate90(sample.image, quarter), rotation=degrees))
    logger.debug("Augmented %d sources into %d samples", len(out) // 4, len(out))
    return out


def conform(samples: Iterable[Sample], input_size: int, sharpened: bool) -> list[Sample]:
    """Resize to the model's input and sharpen when the model was trained on sharpened images."""

    out = []
    for sample in samples:
        image = sample.image
        if image.shape != (input_size, input_size):
            image = resize_square(image, input_size)
        if sharpened and not sample.sharpened:
            image = sharpen(image)
        if image is sample.image:
            out.append(sample)
        else:
            out.append(replace(sample, image=image, sharpened=sample.sharpened or sharpened))
    return out


def stack_inputs(samples: list[Sample]) -> Tensor:
    """Batch tensor ``[N, S, S, 1]`` for the network."""

    return np.stack([to_input(sample.image) for sample in samples]) if samples else np.zeros((0, 0, 0, 1))


def groups_of(samples: Iterable[Sample]) -> set[str]:
    return {sample.group_id for sample in samples}
