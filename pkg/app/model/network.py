"""Executable network built from a :class:`ModelConfig`."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from app.errors import ShapeError
from app.model.config import ConvSpec, DenseSpec, FlattenSpec, ModelConfig, PoolSpec, layer_names, shape_chain
from app.nn import (
    ConvParams,
    DenseParams,
    Mode,
    PoolParams,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    dropout_backward,
    dropout_forward,
    maxpool_backward,
    maxpool_forward,
    relu_backward,
    relu_forward,
    softmax,
    softmax_xent,
)
from app.optim import L2Config, NadamState, l2_apply
from app.tensor import TRAIN_DTYPE, Prng, Stream, Tensor

logger = logging.getLogger(__name__)

WEIGHT_SUFFIXES = (".kernel", ".weights")


@dataclass(slots=True)
class Model:
    config: ModelConfig
    params: dict[str, Tensor]
    optimizer: NadamState = field(default_factory=NadamState)

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.params.values())).dtype

    def snapshot(self) -> dict[str, Tensor]:
        return {name: value.copy() for name, value in self.params.items()}

    def restore(self, snapshot: dict[str, Tensor]) -> None:
        """Copy values back in place so existing references stay valid."""

        for name, value in snapshot.items():
            self.params[name][...] = value

    def astype(self, dtype: npt.DTypeLike) -> Model:
        """Independent copy in ``dtype`` with fresh optimizer state (used by gradient checks)."""

        return Model(
            config=self.config,
            params={name: value.astype(dtype) for name, value in self.params.items()},
            optimizer=NadamState(lr=self.optimizer.lr),
        )


@dataclass(slots=True)
class ForwardTrace:
    """Per-layer caches of one training-mode forward call, in execution order."""

    entries: list[tuple[str, str, Any]] = field(default_factory=list)
    input_shape: tuple[int, ...] = ()

    def add(self, layer: str, kind: str, cache: Any) -> None:
        self.entries.append((layer, kind, cache))


def is_weight(name: str) -> bool:
    return name.endswith(WEIGHT_SUFFIXES)


def _glorot_limit(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def build_model(config: ModelConfig, *, dtype: npt.DTypeLike = TRAIN_DTYPE, lr: float = 0.002) -> Model:
    """Glorot-uniform weights from the seed's init substream; zero biases."""

    chain = shape_chain(config)
    rng = Prng(config.seed, Stream.INIT)
    params: dict[str, Tensor] = {}

    for index, (name, spec) in enumerate(zip(layer_names(config), config.layers)):
        in_shape = chain[index][1]
        if isinstance(spec, ConvSpec):
            kh, kw = spec.kernel
            channels = in_shape[-1]
            limit = _glorot_limit(kh * kw * channels, kh * kw * spec.filters)
            shape = (spec.filters, kh, kw, channels)
            params[f"{name}.kernel"] = rng.generator.uniform(-limit, limit, shape).astype(dtype)
            params[f"{name}.bias"] = np.zeros(spec.filters, dtype=dtype)
        elif isinstance(spec, DenseSpec):
            limit = _glorot_limit(in_shape[0], spec.units)
            shape = (spec.units, in_shape[0])
            params[f"{name}.weights"] = rng.generator.uniform(-limit, limit, shape).astype(dtype)
            params[f"{name}.bias"] = np.zeros(spec.units, dtype=dtype)

    logger.debug("Built model with %d parameter tensors", len(params))
    return Model(config=config, params=params, optimizer=NadamState(lr=lr))


def _hidden_dense(config: ModelConfig) -> set[int]:
    dense_positions = [i for i, spec in enumerate(config.layers) if isinstance(spec, DenseSpec)]
    return set(dense_positions[:-1])


def forward(
    model: Model,
    image: Tensor,
    mode: Mode = Mode.INFER,
    rng: Prng | None = None,
) -> tuple[Tensor, ForwardTrace | None]:
    """Logits for one image ``[S, S, 1]`` or a batch ``[N, S, S, 1]``.

    Caches are kept only in training mode, where ``rng`` drives dropout.
    """

    config = model.config
    x = np.asarray(image, dtype=model.dtype)
    expected = (config.input_size, config.input_size, 1)
    if x.ndim not in (3, 4) or x.shape[-3:] != expected:
        raise ShapeError(f"expected image of shape {expected} (optionally batched), got {x.shape}")

    mode = Mode(mode)
    trace = ForwardTrace(input_shape=x.shape) if mode is Mode.TRAIN else None
    record = trace.add if trace is not None else _discard
    hidden = _hidden_dense(config)
    params = model.params

    for index, (name, spec) in enumerate(zip(layer_names(config), config.layers)):
        if isinstance(spec, ConvSpec):
            p = ConvParams(kernel=params[f"{name}.kernel"], bias=params[f"{name}.bias"], stride=spec.stride)
            x, cache = conv2d_forward(x, p)
            record(name, "conv", cache)
            x, cache = relu_forward(x)
            record(name, "relu", cache)
        elif isinstance(spec, PoolSpec):
            x, cache = maxpool_forward(x, PoolParams(window=spec.window, stride=spec.stride))
            record(name, "pool", cache)
        elif isinstance(spec, FlattenSpec):
            record(name, "flatten", x.shape)
            x = x.reshape(x.shape[:-3] + (-1,))
        else:
            p = DenseParams(weights=params[f"{name}.weights"], bias=params[f"{name}.bias"])
            x, cache = dense_forward(x, p)
            record(name, "dense", cache)
            if index in hidden:
                x, cache = relu_forward(x)
                record(name, "relu", cache)
                x, cache = dropout_forward(x, config.dropout_rate, mode, rng)
                record(name, "dropout", cache)
    return x, trace


def backward(model: Model, trace: ForwardTrace, grad_logits: Tensor) -> dict[str, Tensor]:
    """Parameter gradients of ``sum(grad_logits * logits)`` through the cached forward pass."""

    specs = dict(zip(layer_names(model.config), model.config.layers))
    params = model.params
    grads: dict[str, Tensor] = {}
    g = np.asarray(grad_logits)

    for name, kind, cache in reversed(trace.entries):
        if kind == "dense":
            p = DenseParams(weights=params[f"{name}.weights"], bias=params[f"{name}.bias"])
            g, grads[f"{name}.weights"], grads[f"{name}.bias"] = dense_backward(g, cache, p)
        elif kind == "conv":
            spec = specs[name]
            p = ConvParams(kernel=params[f"{name}.kernel"], bias=params[f"{name}.bias"], stride=spec.stride)
            g, grads[f"{name}.kernel"], grads[f"{name}.bias"] = conv2d_backward(g, cache, p)
        elif kind == "relu":
            g = relu_backward(g, cache)
        elif kind == "dropout":
            g = dropout_backward(g, cache)
        elif kind == "pool":
            g = maxpool_backward(g, cache)
        elif kind == "flatten":
            g = g.reshape(cache)
    return {name: grads[name] for name in params}


def l2_penalty(model: Model, l2: L2Config) -> tuple[float, dict[str, Tensor]]:
    total = 0.0
    grads: dict[str, Tensor] = {}
    for name, value in model.params.items():
        if is_weight(name):
            penalty, grads[name] = l2_apply(value, l2)
            total += penalty
    return total, grads


@dataclass(frozen=True, slots=True)
class LossResult:
    total: float
    data: float
    probs: Tensor
    grads: dict[str, Tensor]


def loss_and_grads(
    model: Model,
    images: Tensor,
    labels: np.ndarray,
    l2: L2Config,
    rng: Prng | None = None,
) -> LossResult:
    """Total loss (mean cross-entropy + L2 penalty) and its parameter gradients.

    ``rng`` drives dropout; without one the pass runs with dropout disabled.
    """

    target = model
    if rng is None:
        target = Model(config=model.config.model_copy(update={"dropout_rate": 0.0}), params=model.params)
        rng = Prng(0)
    logits, trace = forward(target, images, Mode.TRAIN, rng)
    assert trace is not None
    data_loss, grad_logits, probs = softmax_xent(logits, labels)
    grads = backward(target, trace, grad_logits)
    penalty, l2_grads = l2_penalty(model, l2)
    for name, extra in l2_grads.items():
        grads[name] = grads[name] + extra
    return LossResult(total=data_loss + penalty, data=data_loss, probs=probs, grads=grads)


def predict_proba(model: Model, images: Tensor, batch_size: int = 64) -> Tensor:
    """Softmax probabilities for ``[N, S, S, 1]`` images, evaluated in chunks."""

    x = np.asarray(images)
    if x.ndim == 3:
        x = x[np.newaxis]
    chunks = []
    for start in range(0, x.shape[0], batch_size):
        logits, _ = forward(model, x[start : start + batch_size], Mode.INFER)
        chunks.append(softmax(logits))
    if not chunks:
        return np.zeros((0, model.config.num_classes), dtype=model.dtype)
    return np.concatenate(chunks, axis=0)


def predict(model: Model, images: Tensor, batch_size: int = 64) -> np.ndarray:
    """Argmax class indices; ties resolve to the lower index."""

    return np.argmax(predict_proba(model, images, batch_size), axis=-1)


def _discard(*_: Any) -> None:
    return None
