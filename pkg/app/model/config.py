"""Declarative network topology and its shape arithmetic."""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from app.errors import InvalidClassesError, TopologyError
from app.nn.conv import output_extent

SUPPORTED_CLASS_COUNTS = (2, 3)


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConvSpec(_Spec):
    kind: Literal["conv"] = "conv"
    filters: int = Field(ge=1)
    kernel: tuple[int, int]
    stride: tuple[int, int] = (1, 1)


class PoolSpec(_Spec):
    kind: Literal["maxpool"] = "maxpool"
    window: tuple[int, int] = (2, 2)
    stride: tuple[int, int] = (2, 2)


class FlattenSpec(_Spec):
    kind: Literal["flatten"] = "flatten"


class DenseSpec(_Spec):
    kind: Literal["dense"] = "dense"
    units: int = Field(ge=1)


LayerSpec = Annotated[Union[ConvSpec, PoolSpec, FlattenSpec, DenseSpec], Field(discriminator="kind")]


class ModelConfig(BaseModel):
    """Network description; its JSON dump is the model file header.

    ReLU follows every convolution and every hidden dense layer; dropout at
    ``dropout_rate`` follows every hidden dense layer; the last dense layer
    feeds the softmax head.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_size: int = Field(ge=1)
    layers: tuple[LayerSpec, ...]
    num_classes: Literal[2, 3]
    seed: int = 0
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)
    sharpen: bool = False
    class_names: tuple[str, ...] = ()


def canonical_config(num_classes: int, *, input_size: int = 300, seed: int = 0) -> ModelConfig:
    """The best topology found by cross-validation: two conv/pool stages, two 32-unit dense layers."""

    if num_classes not in SUPPORTED_CLASS_COUNTS:
        raise InvalidClassesError(f"num_classes must be 2 or 3, got {num_classes}")
    return ModelConfig(
        input_size=input_size,
        num_classes=num_classes,
        seed=seed,
        layers=(
            ConvSpec(filters=16, kernel=(2, 2), stride=(1, 1)),
            PoolSpec(window=(2, 2), stride=(2, 2)),
            ConvSpec(filters=64, kernel=(3, 3), stride=(1, 1)),
            PoolSpec(window=(2, 2), stride=(2, 2)),
            FlattenSpec(),
            DenseSpec(units=32),
            DenseSpec(units=32),
            DenseSpec(units=num_classes),
        ),
    )


def layer_names(config: ModelConfig) -> list[str]:
    """Stable per-layer names (``conv1``, ``pool1``, ``flatten``, ``dense1`` …)."""

    counters: dict[str, int] = {}
    names: list[str] = []
    for spec in config.layers:
        prefix = {"conv": "conv", "maxpool": "pool", "flatten": "flatten", "dense": "dense"}[spec.kind]
        counters[prefix] = counters.get(prefix, 0) + 1
        names.append(prefix if prefix == "flatten" else f"{prefix}{counters[prefix]}")
    return names


def shape_chain(config: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Walk the topology and return ``(layer name, output shape)`` pairs, input first.

    Raises :class:`TopologyError` when the layers do not chain from a
    ``size × size × 1`` image to ``num_classes`` logits.
    """

    shape: tuple[int, ...] = (config.input_size, config.input_size, 1)
    chain: list[tuple[str, tuple[int, ...]]] = [("input", shape)]
    flattened = False

    for name, spec in zip(layer_names(config), config.layers):
        if isinstance(spec, (ConvSpec, PoolSpec)):
            if flattened:
                raise TopologyError(f"{name}: spatial layer after flatten")
            window = spec.kernel if isinstance(spec, ConvSpec) else spec.window
            if min(window) < 1 or min(spec.stride) < 1:
                raise TopologyError(f"{name}: window and stride must be >= 1")
            height, width, channels = shape
            if height < window[0] or width < window[1]:
                raise TopologyError(f"{name}: window {window} exceeds spatial extent {height}x{width}")
            out_h = output_extent(height, window[0], spec.stride[0])
            out_w = output_extent(width, window[1], spec.stride[1])
            shape = (out_h, out_w, spec.filters if isinstance(spec, ConvSpec) else channels)
        elif isinstance(spec, FlattenSpec):
            if flattened:
                raise TopologyError("flatten appears twice")
            flattened = True
            shape = (shape[0] * shape[1] * shape[2],)
        else:
            if not flattened:
                raise TopologyError(f"{name}: dense layer before flatten")
            shape = (spec.units,)
        chain.append((name, shape))

    if not config.layers or not isinstance(config.layers[-1], DenseSpec):
        raise TopologyError("the last layer must be dense")
    if shape != (config.num_classes,):
        raise TopologyError(f"output layer has {shape[0]} units, expected {config.num_classes}")
    return chain


def flatten_size(config: ModelConfig) -> int:
    for (name, shape) in shape_chain(config):
        if name == "flatten":
            return shape[0]
    raise TopologyError("topology has no flatten layer")


def param_count(config: ModelConfig) -> int:
    """Trainable scalars (weights and biases) implied by the shape rules."""

    chain = shape_chain(config)
    total = 0
    for index, spec in enumerate(config.layers):
        in_shape = chain[index][1]
        if isinstance(spec, ConvSpec):
            total += spec.filters * spec.kernel[0] * spec.kernel[1] * in_shape[-1] + spec.filters
        elif isinstance(spec, DenseSpec):
            total += spec.units * in_shape[0] + spec.units
    return total
