"""ReLU and inverted dropout."""

from __future__ import annotations

import numpy as np

from app.errors import InvalidRateError
from app.nn.cache import DropoutCache, Mode, ReluCache
from app.tensor.core import Tensor
from app.tensor.prng import Prng


def relu_forward(input: Tensor) -> tuple[Tensor, ReluCache]:
    x = np.asarray(input)
    active = x > 0
    out = np.where(active, x, np.zeros((), dtype=x.dtype))
    return out, ReluCache(output_shape=out.shape, active=active)


def relu_backward(grad_out: Tensor, cache: ReluCache) -> Tensor:
    """Pass gradient where the input was strictly positive (derivative at 0 is 0)."""

    g = np.asarray(grad_out)
    cache.check(g, ReluCache)
    return np.where(cache.active, g, np.zeros((), dtype=g.dtype))


def dropout_forward(
    input: Tensor,
    rate: float,
    mode: Mode,
    rng: Prng | None = None,
) -> tuple[Tensor, DropoutCache]:
    """Inverted dropout: survivors are scaled by ``1/(1-rate)`` so inference is identity."""

    if not 0.0 <= rate < 1.0:
        raise InvalidRateError(f"dropout rate must be in [0, 1), got {rate}")
    x = np.asarray(input)
    if Mode(mode) is Mode.INFER:
        return x, DropoutCache(output_shape=x.shape, scale=None)
    if rng is None:
        raise InvalidRateError("training-mode dropout needs a random generator")

    keep = rng.random(x.shape) >= rate
    scale = keep.astype(x.dtype) / x.dtype.type(1.0 - rate)
    out = x * scale
    return out, DropoutCache(output_shape=out.shape, scale=scale)


def dropout_backward(grad_out: Tensor, cache: DropoutCache) -> Tensor:
    g = np.asarray(grad_out)
    cache.check(g, DropoutCache)
    if cache.scale is None:
        return g
    return g * cache.scale
