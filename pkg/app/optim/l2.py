"""L2 weight penalty ``λ·Σw²`` with gradient ``2λw``; biases are never penalised."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.errors import InvalidRangeError
from app.tensor.core import Tensor


@dataclass(frozen=True, slots=True)
class L2Config:
    lam: float = 0.01

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise InvalidRangeError(f"L2 lambda must be >= 0, got {self.lam}")


def l2_apply(weights: Tensor, cfg: L2Config) -> tuple[float, Tensor]:
    w = np.asarray(weights)
    penalty = cfg.lam * float(np.sum(np.square(w, dtype=np.float64)))
    return penalty, (2.0 * cfg.lam) * w
