"""Dense float tensors.

Tensors are plain ``numpy.ndarray`` values in C (row-major) order. Training
runs in float32; gradient checks switch to float64 via ``dtype``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import numpy.typing as npt

from app.errors import InvalidShapeError

Tensor = npt.NDArray[np.floating]

TRAIN_DTYPE = np.float32
CHECK_DTYPE = np.float64


def validate_shape(shape: Sequence[int]) -> tuple[int, ...]:
    """Return ``shape`` as a tuple, rejecting empty shapes and extents below 1."""

    extents = tuple(int(extent) for extent in shape)
    if not extents or any(extent < 1 for extent in extents):
        raise InvalidShapeError(f"invalid tensor shape {list(shape)}: all extents must be >= 1")
    return extents


def tensor_new(shape: Sequence[int], fill: float = 0.0, *, dtype: npt.DTypeLike = TRAIN_DTYPE) -> Tensor:
    """Return a tensor of ``shape`` with every element equal to ``fill``."""

    return np.full(validate_shape(shape), fill, dtype=dtype)


def flat_index(shape: Sequence[int], coords: Sequence[int]) -> int:
    """Row-major offset of ``coords``; for ``[a, b, c]`` this is ``(i*b + j)*c + k``."""

    return int(np.ravel_multi_index(tuple(coords), validate_shape(shape), order="C"))


def unflat_index(shape: Sequence[int], index: int) -> tuple[int, ...]:
    return tuple(int(c) for c in np.unravel_index(index, validate_shape(shape), order="C"))
