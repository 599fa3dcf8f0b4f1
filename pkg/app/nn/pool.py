"""Max pooling over ``[..., H, W, C]`` inputs with floor-mode edges."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.errors import ShapeError
from app.nn.cache import PoolCache
from app.nn.conv import offset_slice, output_extent
from app.tensor.core import Tensor


@dataclass(frozen=True, slots=True)
class PoolParams:
    window: tuple[int, int] = (2, 2)
    stride: tuple[int, int] = (2, 2)

    def __post_init__(self) -> None:
        if min(self.window) < 1 or min(self.stride) < 1:
            raise ShapeError(f"pool window {self.window} and stride {self.stride} must be >= 1")


def maxpool_forward(input: Tensor, p: PoolParams) -> tuple[Tensor, PoolCache]:
    """Per-window, per-channel maximum.

    Windows that would overrun the bottom/right edge are dropped. The argmax is
    the window offset ``i*kw + j`` of the first maximal element in row-major
    window order.
    """

    x = np.asarray(input)
    if x.ndim < 3:
        raise ShapeError(f"pooling input must be [..., H, W, C], got {x.shape}")
    height, width = x.shape[-3], x.shape[-2]
    kh, kw = p.window
    sh, sw = p.stride
    if height < kh or width < kw:
        raise ShapeError(f"pool window {kh}x{kw} is larger than input {height}x{width}")

    out_h = output_extent(height, kh, sh)
    out_w = output_extent(width, kw, sw)

    best = x[..., offset_slice(0, out_h, sh), offset_slice(0, out_w, sw), :].copy()
    argmax = np.zeros(best.shape, dtype=np.int16)
    for offset in range(1, kh * kw):
        i, j = divmod(offset, kw)
        candidate = x[..., offset_slice(i, out_h, sh), offset_slice(j, out_w, sw), :]
        better = candidate > best
        best = np.where(better, candidate, best)
        argmax[better] = offset

    cache = PoolCache(
        output_shape=best.shape,
        input_shape=x.shape,
        argmax=argmax,
        window=(kh, kw),
        stride=(sh, sw),
    )
    return best, cache


def maxpool_backward(grad_out: Tensor, cache: PoolCache) -> Tensor:
    """Route each gradient to its window's argmax; overlapping windows accumulate."""

    g = np.asarray(grad_out)
    cache.check(g, PoolCache)
    kh, kw = cache.window
    sh, sw = cache.stride
    out_h, out_w = g.shape[-3], g.shape[-2]

    grad_in = np.zeros(cache.input_shape, dtype=g.dtype)
    for offset in range(kh * kw):
        i, j = divmod(offset, kw)
        routed = np.where(cache.argmax == offset, g, 0)
        grad_in[..., offset_slice(i, out_h, sh), offset_slice(j, out_w, sw), :] += routed
    return grad_in
