"""Tests for topology arithmetic, network execution and model files."""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import (
    BadMagicError,
    ChecksumError,
    InvalidClassesError,
    ShapeError,
    TopologyError,
    TruncatedModelError,
    VersionMismatchError,
)
from app.model import (
    ConvSpec,
    DenseSpec,
    FlattenSpec,
    ModelConfig,
    PoolSpec,
    build_model,
    canonical_config,
    decode_model,
    encode_model,
    flatten_size,
    forward,
    is_weight,
    load_model,
    loss_and_grads,
    param_count,
    predict,
    predict_proba,
    save_model,
    shape_chain,
)
from app.nn import Mode
from app.optim import L2Config
from app.tensor import CHECK_DTYPE, Prng, finite_diff_grad, relative_error


def _small_config(num_classes: int = 3, seed: int = 0, dropout_rate: float = 0.5) -> ModelConfig:
    return ModelConfig(
        input_size=10,
        num_classes=num_classes,
        seed=seed,
        dropout_rate=dropout_rate,
        layers=(
            ConvSpec(filters=2, kernel=(3, 3)),
            PoolSpec(),
            FlattenSpec(),
            DenseSpec(units=4),
            DenseSpec(units=num_classes),
        ),
    )


def test_canonical_shape_chain() -> None:
    chain = dict(shape_chain(canonical_config(3)))
    assert chain["input"] == (300, 300, 1)
    assert chain["conv1"] == (299, 299, 16)
    assert chain["pool1"] == (149, 149, 16)
    assert chain["conv2"] == (147, 147, 64)
    assert chain["pool2"] == (73, 73, 64)
    assert chain["flatten"] == (341_056,)
    assert chain["dense3"] == (3,)
    assert flatten_size(canonical_config(3)) == 341_056


def test_canonical_param_count_matches_built_tensors() -> None:
    config = canonical_config(3)
    assert param_count(config) == 10_924_339

    model = build_model(config)
    assert sum(value.size for value in model.params.values()) == 10_924_339


def test_each_extra_class_adds_one_output_row() -> None:
    # one more output unit costs 32 weights plus a bias
    assert param_count(canonical_config(3)) - param_count(canonical_config(2)) == 33


@pytest.mark.parametrize("num_classes", [1, 4])
def test_canonical_rejects_unsupported_class_counts(num_classes: int) -> None:
    with pytest.raises(InvalidClassesError):
        canonical_config(num_classes)


def test_topology_errors() -> None:
    too_small = ModelConfig(
        input_size=2,
        num_classes=2,
        layers=(ConvSpec(filters=1, kernel=(3, 3)), FlattenSpec(), DenseSpec(units=2)),
    )
    with pytest.raises(TopologyError):
        shape_chain(too_small)

    wrong_output = ModelConfig(input_size=4, num_classes=3, layers=(FlattenSpec(), DenseSpec(units=2)))
    with pytest.raises(TopologyError):
        shape_chain(wrong_output)

    dense_first = ModelConfig(input_size=4, num_classes=2, layers=(DenseSpec(units=2),))
    with pytest.raises(TopologyError):
        shape_chain(dense_first)


def test_config_rejects_unknown_fields_and_bad_rate() -> None:
    with pytest.raises(ValidationError):
        ModelConfig(input_size=4, num_classes=2, layers=(), colour=True)  # type: ignore[call-arg]
    with pytest.raises(ValidationError):
        ModelConfig(input_size=4, num_classes=2, layers=(), dropout_rate=1.0)


def test_config_json_round_trip_keeps_layer_kinds() -> None:
    config = _small_config()
    again = ModelConfig.model_validate_json(config.model_dump_json())
    assert again == config
    assert isinstance(again.layers[1], PoolSpec)


def test_build_is_deterministic_per_seed() -> None:
    first = build_model(_small_config(seed=4))
    second = build_model(_small_config(seed=4))
    other = build_model(_small_config(seed=5))

    for name in first.params:
        np.testing.assert_array_equal(first.params[name], second.params[name])
    assert not np.array_equal(first.params["conv1.kernel"], other.params["conv1.kernel"])


def test_build_zero_biases_and_glorot_bounds() -> None:
    model = build_model(_small_config())
    limit_conv = math.sqrt(6.0 / (9 * 1 + 9 * 2))
    limit_dense = math.sqrt(6.0 / (32 + 4))

    assert np.abs(model.params["conv1.kernel"]).max() <= limit_conv + 1e-6
    assert np.abs(model.params["dense1.weights"]).max() <= limit_dense + 1e-6
    for name, value in model.params.items():
        if not is_weight(name):
            assert not value.any()


def test_forward_shapes_and_probabilities() -> None:
    model = build_model(_small_config())
    images = Prng(1).random((5, 10, 10, 1))

    logits, trace = forward(model, images[0])
    assert logits.shape == (3,)
    assert trace is None

    probs = predict_proba(model, images, batch_size=2)
    assert probs.shape == (5, 3)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, rtol=1e-5)
    np.testing.assert_array_equal(predict(model, images), probs.argmax(axis=1))


def test_forward_rejects_wrong_image_shape() -> None:
    model = build_model(_small_config())
    with pytest.raises(ShapeError):
        forward(model, np.zeros((12, 12, 1)))


def test_inference_is_deterministic_and_training_mode_uses_dropout() -> None:
    model = build_model(_small_config())
    image = Prng(2).random((10, 10, 1))

    first, _ = forward(model, image)
    second, _ = forward(model, image)
    np.testing.assert_array_equal(first, second)

    trained_a, trace = forward(model, image, Mode.TRAIN, Prng(3))
    trained_b, _ = forward(model, image, Mode.TRAIN, Prng(3))
    assert trace is not None and trace.entries
    np.testing.assert_array_equal(trained_a, trained_b)


@pytest.mark.parametrize("seed", range(20))
def test_whole_model_gradients_match_finite_differences(seed: int) -> None:
    model = build_model(_small_config(seed=seed)).astype(CHECK_DTYPE)
    rng = Prng(seed, 99)
    images = rng.random((3, 10, 10, 1))
    labels = np.array([0, 1, 2])
    l2 = L2Config(lam=0.01)

    result = loss_and_grads(model, images, labels, l2)

    for name in model.params:
        original = model.params[name].copy()

        def loss_at(value: np.ndarray, name: str = name) -> float:
            model.params[name][...] = value
            return loss_and_grads(model, images, labels, l2).total

        numeric = finite_diff_grad(loss_at, original)
        model.params[name][...] = original
        assert relative_error(result.grads[name], numeric) < 1e-3, name


def test_loss_includes_l2_on_weights_only() -> None:
    model = build_model(_small_config(dropout_rate=0.0)).astype(CHECK_DTYPE)
    images = Prng(0).random((2, 10, 10, 1))
    labels = np.array([0, 1])

    plain = loss_and_grads(model, images, labels, L2Config(lam=0.0))
    penalised = loss_and_grads(model, images, labels, L2Config(lam=0.1))
    expected = 0.1 * sum(float(np.sum(v**2)) for n, v in model.params.items() if is_weight(n))

    assert plain.total == pytest.approx(plain.data)
    assert penalised.total - penalised.data == pytest.approx(expected)
    np.testing.assert_allclose(penalised.grads["dense1.bias"], plain.grads["dense1.bias"])


def test_save_load_round_trip_is_byte_identical(tmp_path: Path) -> None:
    model = build_model(_small_config(seed=7))
    model.params["dense1.bias"][...] = 0.25
    path = tmp_path / "nested" / "model.mtcn"
    save_model(model, path)

    loaded = load_model(path)
    assert loaded.config == model.config
    for name in model.params:
        np.testing.assert_array_equal(loaded.params[name], model.params[name])
    assert encode_model(loaded) == path.read_bytes()


def test_load_rejects_truncated_file() -> None:
    data = encode_model(build_model(_small_config()))
    with pytest.raises(TruncatedModelError):
        decode_model(data[:-10])
    with pytest.raises(TruncatedModelError):
        decode_model(data[:3])


def test_load_rejects_bad_magic_and_version() -> None:
    data = encode_model(build_model(_small_config()))
    with pytest.raises(BadMagicError):
        decode_model(b"XXXX" + data[4:])
    with pytest.raises(VersionMismatchError):
        decode_model(data[:4] + struct.pack("<H", 99) + data[6:])


def test_load_rejects_corrupted_tensor_data() -> None:
    data = bytearray(encode_model(build_model(_small_config())))
    data[-8] ^= 0xFF
    with pytest.raises(ChecksumError):
        decode_model(bytes(data))
