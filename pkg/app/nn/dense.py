"""Fully connected layer over ``[..., n]`` inputs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.errors import CacheError, ShapeError
from app.nn.cache import DenseCache
from app.tensor.core import Tensor


@dataclass(slots=True)
class DenseParams:
    weights: Tensor  # [out_units, in_units]
    bias: Tensor  # [out_units]

    def __post_init__(self) -> None:
        if self.weights.ndim != 2 or self.weights.shape[0] < 1:
            raise ShapeError(f"weights must be [out_units, in_units], got {self.weights.shape}")
        if self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(f"bias shape {self.bias.shape} does not match {self.weights.shape[0]} units")


def dense_forward(input: Tensor, p: DenseParams) -> tuple[Tensor, DenseCache]:
    x = np.asarray(input)
    if x.ndim < 1 or x.shape[-1] != p.weights.shape[1]:
        raise ShapeError(f"dense layer expects {p.weights.shape[1]} inputs, got shape {x.shape}")
    out = x @ p.weights.T + p.bias
    return out, DenseCache(output_shape=out.shape, input=x, weights_shape=p.weights.shape)


def dense_backward(grad_out: Tensor, cache: DenseCache, p: DenseParams) -> tuple[Tensor, Tensor, Tensor]:
    g = np.asarray(grad_out)
    cache.check(g, DenseCache)
    if p.weights.shape != cache.weights_shape:
        raise CacheError("dense parameters changed since the forward pass")

    grad_in = g @ p.weights
    g2 = g.reshape(-1, g.shape[-1])
    x2 = cache.input.reshape(-1, cache.input.shape[-1])
    grad_weights = g2.T @ x2
    grad_bias = g2.sum(axis=0)
    return grad_in, grad_weights, grad_bias
