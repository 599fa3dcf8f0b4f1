"""Forward-pass caches consumed by the matching backward pass."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.errors import CacheError


class Mode(str, Enum):
    """Execution mode; dropout is active only while training."""

    TRAIN = "train"
    INFER = "infer"


@dataclass(frozen=True, slots=True)
class LayerCache:
    """Base cache: the forward output shape the gradient must match."""

    output_shape: tuple[int, ...]

    def check(self, grad_out: np.ndarray, kind: type[LayerCache]) -> None:
        if not isinstance(self, kind):
            raise CacheError(f"expected {kind.__name__}, got {type(self).__name__}")
        if tuple(grad_out.shape) != self.output_shape:
            raise CacheError(
                f"gradient shape {tuple(grad_out.shape)} does not match forward output {self.output_shape}"
            )


@dataclass(frozen=True, slots=True)
class ConvCache(LayerCache):
    input: np.ndarray
    kernel_shape: tuple[int, ...]
    stride: tuple[int, int]


@dataclass(frozen=True, slots=True)
class PoolCache(LayerCache):
    input_shape: tuple[int, ...]
    argmax: np.ndarray
    window: tuple[int, int]
    stride: tuple[int, int]


@dataclass(frozen=True, slots=True)
class DenseCache(LayerCache):
    input: np.ndarray
    weights_shape: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ReluCache(LayerCache):
    active: np.ndarray


@dataclass(frozen=True, slots=True)
class DropoutCache(LayerCache):
    scale: np.ndarray | None
