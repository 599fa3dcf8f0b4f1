"""Tests for the NAdam update and the L2 penalty."""

from __future__ import annotations

import math

import numpy as np
import pytest

from app.errors import InvalidRangeError, NumericError, ShapeError
from app.optim import L2Config, NadamState, l2_apply, nadam_step
from app.tensor import finite_diff_grad


def _reference_nadam(theta: float, grads: list[float], lr: float, b1: float = 0.9, b2: float = 0.999) -> float:
    m = n = 0.0
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        n = b2 * n + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        n_hat = n / (1 - b2**t)
        theta -= lr * (b1 * m_hat + (1 - b1) * g / (1 - b1**t)) / (math.sqrt(n_hat) + 1e-8)
    return theta


def test_zero_gradient_leaves_parameters_unchanged() -> None:
    params = {"w": np.array([1.0, -2.0, 3.0])}
    state = NadamState()
    for _ in range(3):
        nadam_step(params, {"w": np.zeros(3)}, state)
    np.testing.assert_array_equal(params["w"], [1.0, -2.0, 3.0])
    assert state.t == 3


def test_first_step_moves_against_the_gradient_sign() -> None:
    params = {"w": np.array([1.0, 1.0])}
    nadam_step(params, {"w": np.array([0.5, -4.0])}, NadamState(lr=0.002))
    # at t=1 both moment corrections cancel, so the step is lr*(1+b1)*sign(g)
    np.testing.assert_allclose(params["w"], [1.0 - 0.0038, 1.0 + 0.0038], rtol=1e-6)


def test_zero_beta1_reduces_to_bias_corrected_rms_step() -> None:
    params = {"w": np.array([0.0])}
    nadam_step(params, {"w": np.array([3.0])}, NadamState(lr=0.1, beta1=0.0))
    assert params["w"][0] == pytest.approx(-0.1, rel=1e-6)


def test_scalar_trajectory_matches_hand_reference() -> None:
    grads = [0.3, -0.1, 0.25, 0.05, -0.4, 0.2]
    params = {"w": np.array([0.7])}
    state = NadamState(lr=0.01)
    for g in grads:
        nadam_step(params, {"w": np.array([g])}, state)
    assert params["w"][0] == pytest.approx(_reference_nadam(0.7, grads, lr=0.01), abs=1e-9)


def test_unit_gradient_trajectory_from_one() -> None:
    params = {"w": np.array([1.0])}
    state = NadamState()
    for t in range(1, 4):
        nadam_step(params, {"w": np.array([1.0])}, state)
        assert params["w"][0] == pytest.approx(_reference_nadam(1.0, [1.0] * t, lr=0.002), abs=1e-12)


def test_zero_betas_take_a_normalised_sign_step() -> None:
    params = {"w": np.array([0.5])}
    nadam_step(params, {"w": np.array([1.0])}, NadamState(lr=0.002, beta1=0.0, beta2=0.0))
    assert params["w"][0] == pytest.approx(0.5 - 0.002 / (1 + 1e-8), abs=1e-15)


def test_zero_learning_rate_is_a_no_op() -> None:
    params = {"w": np.array([[1.5, 2.5]], dtype=np.float32)}
    state = NadamState(lr=0.0)
    nadam_step(params, {"w": np.ones((1, 2), dtype=np.float32)}, state)
    np.testing.assert_array_equal(params["w"], [[1.5, 2.5]])
    assert params["w"].dtype == np.float32


def test_update_is_in_place() -> None:
    weights = np.array([1.0, 2.0])
    params = {"w": weights}
    nadam_step(params, {"w": np.array([1.0, 1.0])}, NadamState())
    assert params["w"] is weights
    assert weights[0] < 1.0


def test_non_finite_gradient_aborts_before_any_update() -> None:
    params = {"a": np.array([1.0]), "b": np.array([2.0])}
    state = NadamState()
    with pytest.raises(NumericError):
        nadam_step(params, {"a": np.array([0.5]), "b": np.array([np.nan])}, state)
    np.testing.assert_array_equal(params["a"], [1.0])
    assert state.t == 0
    assert not state.m


def test_gradient_shape_and_name_are_checked() -> None:
    params = {"w": np.zeros(3)}
    with pytest.raises(ShapeError):
        nadam_step(params, {"w": np.zeros(2)}, NadamState())
    with pytest.raises(ShapeError):
        nadam_step(params, {"v": np.zeros(3)}, NadamState())


def test_l2_penalty_and_gradient() -> None:
    penalty, grad = l2_apply(np.array([1.0, 2.0]), L2Config(lam=0.5))
    assert penalty == pytest.approx(2.5)
    np.testing.assert_allclose(grad, [1.0, 2.0])

    penalty, grad = l2_apply(np.array([[3.0, -4.0]]), L2Config(lam=0.0))
    assert penalty == 0.0
    assert not grad.any()


def test_l2_rejects_negative_lambda() -> None:
    with pytest.raises(InvalidRangeError):
        L2Config(lam=-0.01)


def test_l2_gradient_matches_finite_differences() -> None:
    weights = np.array([1.0, -1.0])
    cfg = L2Config(lam=0.01)

    penalty, grad = l2_apply(weights, cfg)

    assert penalty == pytest.approx(0.02)
    np.testing.assert_allclose(grad, [0.02, -0.02])
    numeric = finite_diff_grad(lambda w: l2_apply(w, cfg)[0], weights)
    np.testing.assert_allclose(grad, numeric, atol=1e-9)
