"""Topology configuration, network execution and model files."""

from .config import (
    ConvSpec,
    DenseSpec,
    FlattenSpec,
    LayerSpec,
    ModelConfig,
    PoolSpec,
    canonical_config,
    flatten_size,
    layer_names,
    param_count,
    shape_chain,
)
from .network import (
    ForwardTrace,
    LossResult,
    Model,
    backward,
    build_model,
    forward,
    is_weight,
    l2_penalty,
    loss_and_grads,
    predict,
    predict_proba,
)
from .serialization import FORMAT_VERSION, MAGIC, decode_model, encode_model, load_model, save_model

__all__ = [
    "FORMAT_VERSION",
    "MAGIC",
    "ConvSpec",
    "DenseSpec",
    "FlattenSpec",
    "ForwardTrace",
    "LayerSpec",
    "LossResult",
    "Model",
    "ModelConfig",
    "PoolSpec",
    "backward",
    "build_model",
    "canonical_config",
    "decode_model",
    "encode_model",
    "flatten_size",
    "forward",
    "is_weight",
    "l2_penalty",
    "layer_names",
    "load_model",
    "loss_and_grads",
    "param_count",
    "predict",
    "predict_proba",
    "save_model",
    "shape_chain",
]
