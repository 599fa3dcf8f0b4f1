"""Tensor primitives, seeded randomness and the gradient oracle."""

from .core import CHECK_DTYPE, TRAIN_DTYPE, Tensor, flat_index, tensor_new, unflat_index, validate_shape
from .gradcheck import finite_diff_grad, relative_error
from .prng import Prng, Stream, derive_seed

__all__ = [
    "CHECK_DTYPE",
    "TRAIN_DTYPE",
    "Prng",
    "Stream",
    "Tensor",
    "derive_seed",
    "finite_diff_grad",
    "flat_index",
    "relative_error",
    "tensor_new",
    "unflat_index",
    "validate_shape",
]
