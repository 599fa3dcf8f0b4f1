"""NAdam: Adam with Nesterov momentum applied to the first-moment estimate.

Plain formulation without a momentum-decay schedule::

    m ← β1·m + (1−β1)·g
    n ← β2·n + (1−β2)·g²
    θ ← θ − lr · (β1·m/(1−β1^t) + (1−β1)·g/(1−β1^t)) / (√(n/(1−β2^t)) + ε)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, MutableMapping

import numpy as np

from app.errors import NumericError, ShapeError
from app.tensor.core import Tensor


@dataclass(slots=True)
class NadamState:
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: dict[str, Tensor] = field(default_factory=dict)
    n: dict[str, Tensor] = field(default_factory=dict)

    def moments(self, name: str, param: Tensor) -> tuple[Tensor, Tensor]:
        if name not in self.m:
            self.m[name] = np.zeros_like(param)
            self.n[name] = np.zeros_like(param)
        return self.m[name], self.n[name]


def nadam_step(
    params: MutableMapping[str, Tensor],
    grads: Mapping[str, Tensor],
    state: NadamState,
) -> MutableMapping[str, Tensor]:
    """Apply one optimizer step to every named tensor in ``grads``, in place.

    The step counter advances once per call. Gradients are validated up front,
    so a non-finite tensor aborts the step before anything is modified.
    """

    for name, grad in grads.items():
        if name not in params:
            raise ShapeError(f"gradient for unknown parameter {name!r}")
        if params[name].shape != np.shape(grad):
            raise ShapeError(f"{name}: gradient shape {np.shape(grad)} != parameter shape {params[name].shape}")
        if not np.all(np.isfinite(grad)):
            raise NumericError(f"non-finite gradient in {name!r}; optimizer step aborted")

    state.t += 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    m_correction = 1.0 - b1**state.t
    n_correction = 1.0 - b2**state.t

    for name, grad in grads.items():
        param = params[name]
        m, n = state.moments(name, param)
        m *= b1
        m += (1.0 - b1) * grad
        n *= b2
        n += (1.0 - b2) * np.square(grad)

        m_hat = m / m_correction
        n_hat = n / n_correction
        nesterov = b1 * m_hat + (1.0 - b1) * grad / m_correction
        param -= (state.lr * nesterov / (np.sqrt(n_hat) + eps)).astype(param.dtype, copy=False)
    return params
