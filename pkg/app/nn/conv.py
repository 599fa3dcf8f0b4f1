"""Valid (unpadded) 2-D convolution over ``[..., H, W, C]`` inputs.

Implemented as cross-correlation: output element ``(y, x, f)`` is the dot
product of filter ``f`` with the input patch whose top-left corner is
``(y*sh, x*sw)``. The work is split into one ``[..., C] @ [C, F]`` product per
kernel offset, which keeps memory at the size of a single strided slice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.errors import CacheError, ShapeError
from app.nn.cache import ConvCache
from app.tensor.core import Tensor


@dataclass(slots=True)
class ConvParams:
    kernel: Tensor  # [filters, kh, kw, in_channels]
    bias: Tensor  # [filters]
    stride: tuple[int, int] = (1, 1)

    def __post_init__(self) -> None:
        if self.kernel.ndim != 4:
            raise ShapeError(f"kernel must be [filters, kh, kw, in_channels], got {self.kernel.shape}")
        if self.bias.shape != (self.kernel.shape[0],):
            raise ShapeError(f"bias shape {self.bias.shape} does not match {self.kernel.shape[0]} filters")
        if min(self.stride) < 1:
            raise ShapeError(f"stride must be positive, got {self.stride}")


def output_extent(size: int, window: int, stride: int) -> int:
    """Floor-mode output extent of a valid sliding window."""

    return (size - window) // stride + 1


def offset_slice(start: int, count: int, stride: int) -> slice:
    return slice(start, start + stride * (count - 1) + 1, stride)


def conv2d_forward(input: Tensor, p: ConvParams) -> tuple[Tensor, ConvCache]:
    x = np.asarray(input)
    if x.ndim < 3:
        raise ShapeError(f"convolution input must be [..., H, W, C], got {x.shape}")
    height, width, channels = x.shape[-3:]
    filters, kh, kw, kc = p.kernel.shape
    if channels != kc:
        raise ShapeError(f"input has {channels} channels, kernel expects {kc}")
    if height < kh or width < kw:
        raise ShapeError(f"kernel {kh}x{kw} is larger than input {height}x{width}")

    sh, sw = p.stride
    out_h = output_extent(height, kh, sh)
    out_w = output_extent(width, kw, sw)

    out = np.zeros(x.shape[:-3] + (out_h, out_w, filters), dtype=np.result_type(x, p.kernel))
    for i in range(kh):
        rows = offset_slice(i, out_h, sh)
        for j in range(kw):
            cols = offset_slice(j, out_w, sw)
            out += x[..., rows, cols, :] @ p.kernel[:, i, j, :].T
    out += p.bias

    cache = ConvCache(output_shape=out.shape, input=x, kernel_shape=p.kernel.shape, stride=(sh, sw))
    return out, cache


def conv2d_backward(grad_out: Tensor, cache: ConvCache, p: ConvParams) -> tuple[Tensor, Tensor, Tensor]:
    """Gradients of ``sum(grad_out * output)`` w.r.t. input, kernel and bias."""

    g = np.asarray(grad_out)
    cache.check(g, ConvCache)
    if p.kernel.shape != cache.kernel_shape or tuple(p.stride) != cache.stride:
        raise CacheError("convolution parameters changed since the forward pass")

    x = cache.input
    _, kh, kw, _ = p.kernel.shape
    sh, sw = cache.stride
    out_h, out_w = g.shape[-3], g.shape[-2]
    lead_axes = tuple(range(g.ndim - 1))

    grad_in = np.zeros(x.shape, dtype=np.result_type(g, p.kernel))
    grad_kernel = np.zeros(p.kernel.shape, dtype=np.result_type(g, x))
    for i in range(kh):
        rows = offset_slice(i, out_h, sh)
        for j in range(kw):
            cols = offset_slice(j, out_w, sw)
            grad_in[..., rows, cols, :] += g @ p.kernel[:, i, j, :]
            grad_kernel[:, i, j, :] = np.tensordot(g, x[..., rows, cols, :], axes=(lead_axes, lead_axes))
    grad_bias = g.sum(axis=lead_axes)
    return grad_in, grad_kernel, grad_bias
