"""Finite-difference gradient oracle used to validate every backward pass."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from app.errors import InvalidRangeError, NumericError
from app.tensor.core import CHECK_DTYPE, Tensor


def finite_diff_grad(f: Callable[[Tensor], float], x: Tensor, eps: float = 1e-5) -> Tensor:
    """Central-difference estimate of ``df/dx``, computed in float64.

    ``f`` receives a float64 copy of ``x`` with one element shifted by ``±eps``.
    """

    if not eps > 0:
        raise InvalidRangeError(f"eps must be > 0, got {eps}")

    point = np.array(x, dtype=CHECK_DTYPE, copy=True)
    grad = np.zeros_like(point)
    flat_point = point.reshape(-1)
    flat_grad = grad.reshape(-1)

    for i in range(flat_point.size):
        original = flat_point[i]
        flat_point[i] = original + eps
        upper = float(f(point))
        flat_point[i] = original - eps
        lower = float(f(point))
        flat_point[i] = original
        if not (math.isfinite(upper) and math.isfinite(lower)):
            raise NumericError(f"function is not finite near element {i}")
        flat_grad[i] = (upper - lower) / (2.0 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-12) -> float:
    """``‖a − n‖ / max(‖a‖ + ‖n‖, floor)``; zero when both vanish."""

    a = np.asarray(analytic, dtype=CHECK_DTYPE)
    n = np.asarray(numeric, dtype=CHECK_DTYPE)
    scale = max(float(np.linalg.norm(a) + np.linalg.norm(n)), floor)
    return float(np.linalg.norm(a - n)) / scale
