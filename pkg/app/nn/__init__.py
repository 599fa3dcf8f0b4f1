"""Layer forward/backward passes for the convolutional classifier."""

from .activations import dropout_backward, dropout_forward, relu_backward, relu_forward
from .cache import LayerCache, Mode
from .conv import ConvParams, conv2d_backward, conv2d_forward, output_extent
from .dense import DenseParams, dense_backward, dense_forward
from .losses import softmax, softmax_xent
from .pool import PoolParams, maxpool_backward, maxpool_forward

__all__ = [
    "ConvParams",
    "DenseParams",
    "LayerCache",
    "Mode",
    "PoolParams",
    "conv2d_backward",
    "conv2d_forward",
    "dense_backward",
    "dense_forward",
    "dropout_backward",
    "dropout_forward",
    "maxpool_backward",
    "maxpool_forward",
    "output_extent",
    "relu_backward",
    "relu_forward",
    "softmax",
    "softmax_xent",
]
