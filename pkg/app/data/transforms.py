"""Pixel-level preprocessing: bit-depth reduction, resizing, sharpening and rotation."""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageFilter

from app.errors import ImageSizeError, InvalidRangeError, ShapeError
from app.tensor import TRAIN_DTYPE, Tensor

QUARTER_TURNS = (0, 1, 2, 3)


def to_8bit(raw: np.ndarray) -> np.ndarray:
    """Linearly map ``[min, max]`` onto ``[0, 255]`` with round-half-up; constant input maps to 0."""

    values = np.asarray(raw, dtype=np.int64)
    lo, hi = int(values.min()), int(values.max())
    span = hi - lo
    if span == 0:
        return np.zeros(values.shape, dtype=np.uint8)
    # floor(v + 1/2) with v = (x - lo) * 255 / span, kept in integers
    scaled = (2 * (values - lo) * 255 + span) // (2 * span)
    return scaled.astype(np.uint8)


def pad_square(img: np.ndarray) -> np.ndarray:
    """Zero-pad to a centered square; the odd pixel goes right/bottom."""

    height, width = img.shape
    side = max(height, width)
    top = (side - height) // 2
    left = (side - width) // 2
    padded = np.zeros((side, side), dtype=img.dtype)
    padded[top : top + height, left : left + width] = img
    return padded


def resize_square(img: np.ndarray, target: int) -> np.ndarray:
    """Centered zero-pad to square, then bilinear resample to ``target × target``."""

    if target < 1:
        raise InvalidRangeError(f"target size must be >= 1, got {target}")
    matrix = np.asarray(img, dtype=np.uint8)
    if matrix.ndim != 2 or min(matrix.shape) < 1:
        raise ShapeError(f"expected a non-empty 2-D image, got shape {matrix.shape}")
    square = pad_square(matrix)
    if square.shape[0] == target:
        return square
    resized = Image.fromarray(square).resize((target, target), Image.Resampling.BILINEAR)
    return np.asarray(resized, dtype=np.uint8)


def sharpen(img: np.ndarray) -> np.ndarray:
    """3×3 sharpen (centre 32, neighbours -2, divisor 16) with copied border pixels."""

    matrix = np.asarray(img, dtype=np.uint8)
    if matrix.ndim != 2 or matrix.shape[0] < 3 or matrix.shape[1] < 3:
        raise ImageSizeError(f"sharpen needs an image of at least 3x3, got shape {matrix.shape}")
    filtered = Image.fromarray(matrix).filter(ImageFilter.SHARPEN)
    return np.asarray(filtered, dtype=np.uint8)


def rotate90(img: np.ndarray, quarter_turns: int) -> np.ndarray:
    """Exact clockwise rotation by ``90 * quarter_turns`` degrees of a square image."""

    if quarter_turns not in QUARTER_TURNS:
        raise InvalidRangeError(f"quarter_turns must be one of {QUARTER_TURNS}, got {quarter_turns}")
    matrix = np.asarray(img)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"rotation requires a square image, got shape {matrix.shape}")
    return np.ascontiguousarray(np.rot90(matrix, k=-quarter_turns))


def to_input(img: np.ndarray) -> Tensor:
    """``[S, S]`` uint8 pixels to the network input ``[S, S, 1]`` scaled to ``[0, 1]``."""

    return (np.asarray(img, dtype=TRAIN_DTYPE) / 255.0)[..., np.newaxis]
