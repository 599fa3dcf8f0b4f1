"""Tests for tensor construction, seeded randomness and the gradient oracle."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from app.errors import InvalidRangeError, InvalidShapeError, NumericError
from app.tensor import (
    CHECK_DTYPE,
    Prng,
    Stream,
    derive_seed,
    finite_diff_grad,
    flat_index,
    relative_error,
    tensor_new,
    unflat_index,
)


def test_tensor_new_fills_every_element() -> None:
    zeros = tensor_new([2, 2], 0.0)
    assert zeros.shape == (2, 2)
    assert np.all(zeros == 0.0)

    sevens = tensor_new([3, 1, 4], 7.5)
    assert sevens.size == 12
    assert np.all(sevens == 7.5)


@pytest.mark.parametrize("shape", [[0, 2], [2, -1], []])
def test_tensor_new_rejects_bad_extents(shape: list[int]) -> None:
    with pytest.raises(InvalidShapeError):
        tensor_new(shape, 1.0)


def test_flat_index_is_row_major_and_round_trips() -> None:
    shape = (2, 3, 4)
    for i, j, k in itertools.product(range(2), range(3), range(4)):
        index = flat_index(shape, (i, j, k))
        assert index == (i * 3 + j) * 4 + k
        assert unflat_index(shape, index) == (i, j, k)


def test_prng_is_deterministic_per_seed() -> None:
    first = Prng(42)
    a, b = first.uniform(0.0, 1.0), first.uniform(0.0, 1.0)
    second = Prng(42)

    assert a != b
    assert (second.uniform(0.0, 1.0), second.uniform(0.0, 1.0)) == (a, b)


def test_prng_uniform_range_and_mean() -> None:
    rng = Prng(7)
    value = rng.uniform(0.0, 1.0)
    assert 0.0 <= value < 1.0

    draws = Prng(7).generator.uniform(0.0, 1.0, 100_000)
    assert abs(draws.mean() - 0.5) < 0.01


def test_prng_rejects_empty_range() -> None:
    with pytest.raises(InvalidRangeError):
        Prng(1).uniform(1.0, 1.0)


def test_substreams_are_independent() -> None:
    init = Prng(5, Stream.INIT).random(8)
    dropout = Prng(5, Stream.DROPOUT).random(8)

    assert not np.array_equal(init, dropout)
    assert np.array_equal(init, Prng(5, Stream.INIT).random(8))
    assert derive_seed(5, Stream.FOLD, 10, 0) != derive_seed(5, Stream.FOLD, 10, 1)


def test_integers_are_inclusive() -> None:
    rng = Prng(3)
    values = {rng.integers(1, 2) for _ in range(200)}
    assert values == {1, 2}


def test_finite_diff_of_sum_is_all_ones() -> None:
    x = Prng(0).random((3, 2))
    grad = finite_diff_grad(lambda v: float(v.sum()), x)
    assert grad.dtype == CHECK_DTYPE
    np.testing.assert_allclose(grad, np.ones_like(x), atol=1e-8)


def test_finite_diff_of_square_matches_analytic() -> None:
    grad = finite_diff_grad(lambda v: float(np.sum(v**2)), np.array([1.0, 2.0]))
    np.testing.assert_allclose(grad, [2.0, 4.0], atol=1e-6)


def test_finite_diff_of_constant_is_zero() -> None:
    grad = finite_diff_grad(lambda v: 3.0, np.ones(4))
    np.testing.assert_allclose(grad, np.zeros(4), atol=1e-9)


def test_finite_diff_quadratic_polynomial_relative_error() -> None:
    rng = Prng(11)
    a = rng.normal(0.0, 1.0, (4, 4))
    b = rng.normal(0.0, 1.0, 4)
    x = rng.normal(0.0, 1.0, 4)

    numeric = finite_diff_grad(lambda v: float(v @ a @ v + b @ v + 2.0), x)
    analytic = (a + a.T) @ x + b
    assert relative_error(analytic, numeric) < 1e-6


def test_finite_diff_rejects_non_finite_values() -> None:
    with pytest.raises(NumericError):
        finite_diff_grad(lambda v: float("inf"), np.zeros(2))


def test_finite_diff_rejects_non_positive_eps() -> None:
    with pytest.raises(InvalidRangeError):
        finite_diff_grad(lambda v: 0.0, np.zeros(2), eps=0.0)
