"""Softmax head with categorical cross-entropy."""

from __future__ import annotations

import numpy as np

from app.errors import LabelError, ShapeError
from app.tensor.core import Tensor


def softmax(logits: Tensor) -> Tensor:
    z = np.asarray(logits)
    shifted = z - z.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def softmax_xent(logits: Tensor, true_class: int | np.ndarray) -> tuple[float, Tensor, Tensor]:
    """Return ``(loss, grad_logits, probs)``.

    ``logits`` is ``[k]`` or ``[N, k]``; for a batch the loss is the mean over
    samples and the gradient is scaled by ``1/N`` accordingly.
    """

    z = np.asarray(logits)
    if z.ndim not in (1, 2) or z.shape[-1] < 2:
        raise ShapeError(f"logits must be [k] or [N, k] with k >= 2, got {z.shape}")
    k = z.shape[-1]
    labels = np.asarray(true_class, dtype=np.int64).reshape(-1)
    batch = 1 if z.ndim == 1 else z.shape[0]
    if labels.size != batch:
        raise LabelError(f"expected {batch} labels, got {labels.size}")
    if np.any(labels < 0) or np.any(labels >= k):
        raise LabelError(f"class index out of range for {k} classes: {labels.tolist()}")

    shifted = z - z.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = (shifted - log_norm).reshape(batch, k)
    probs = np.exp(log_probs)

    rows = np.arange(batch)
    loss = float(-log_probs[rows, labels].mean())
    grad = probs.copy()
    grad[rows, labels] -= 1.0
    grad /= batch
    return loss, grad.reshape(z.shape), probs.reshape(z.shape)
