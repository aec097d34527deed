from pathlib import Path

import numpy as np
import pytest

from app.model import (
    DenseLayer,
    EncoderParams,
    MemoryParams,
    classify,
    encode,
    init_params,
    kink_margin,
    load_checkpoint,
    memory_encode,
    momentum_update,
    save_checkpoint,
)
from app.types import ConfigurationError, DimensionError
from app.verification import oracles


def _params(seed: int = 0) -> EncoderParams:
    return init_params(4, (5, 6), 4, 3, 3, np.random.default_rng(seed))


def test_encode_shapes_and_oracle(rng: np.random.Generator) -> None:
    params = _params()
    x = rng.standard_normal((7, 4))
    enc = encode(params, x)
    assert enc.z.shape == (7, 4)
    assert enc.c.shape == enc.s.shape == (7, 3)
    z, c, s = oracles.encode(params, x)
    np.testing.assert_allclose(enc.z.data, z, atol=1e-12)
    np.testing.assert_allclose(enc.c.data, c, atol=1e-12)
    np.testing.assert_allclose(enc.s.data, s, atol=1e-12)


def test_encode_rejects_wrong_input_width(rng: np.random.Generator) -> None:
    with pytest.raises(DimensionError):
        encode(_params(), rng.standard_normal((2, 5)))


def test_classify_matches_oracle(rng: np.random.Generator) -> None:
    params = _params()
    c = rng.standard_normal((5, 3))
    np.testing.assert_allclose(classify(params.classifier, c).data, oracles.classify(params, c), atol=1e-12)


def test_init_is_deterministic() -> None:
    a, b = _params(3), _params(3)
    for name, array in a.named_arrays().items():
        np.testing.assert_array_equal(array, b.named_arrays()[name])


def test_head_width_mismatch_is_rejected() -> None:
    params = _params()
    with pytest.raises(DimensionError):
        EncoderParams(
            backbone=params.backbone,
            semantic=params.semantic,
            style=DenseLayer.zeros(4, 2),
            classifier=params.classifier,
        )


def test_memory_encode_rows_are_unit(rng: np.random.Generator) -> None:
    params = _params()
    out = memory_encode(MemoryParams.mirror(params), rng.standard_normal((6, 4)))
    np.testing.assert_allclose(np.linalg.norm(out.c, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(out.s, axis=1), 1.0, atol=1e-12)


def test_mirror_is_an_independent_copy() -> None:
    params = _params()
    memory = MemoryParams.mirror(params)
    params.semantic.weight[0, 0] += 1.0
    assert memory.semantic.weight[0, 0] != params.semantic.weight[0, 0]


def test_momentum_update_with_zero_alpha_copies_encoder() -> None:
    params = _params(1)
    memory = MemoryParams.mirror(_params(2))
    momentum_update(memory, params, 0.0)
    for name, array in memory.named_arrays().items():
        np.testing.assert_array_equal(array, params.encoder_arrays()[name])


def test_momentum_update_half_matches_hand_averaged_forward(rng: np.random.Generator) -> None:
    params, other = _params(1), _params(2)
    memory = MemoryParams.mirror(other)
    momentum_update(memory, params, 0.5)
    averaged = _params(1)
    for name, array in averaged.encoder_arrays().items():
        array[...] = 0.5 * other.encoder_arrays()[name] + 0.5 * params.encoder_arrays()[name]
    x = rng.standard_normal((4, 4))
    expected = encode(averaged, x).c.data
    expected = expected / np.linalg.norm(expected, axis=1, keepdims=True)
    np.testing.assert_allclose(memory_encode(memory, x).c, expected, atol=1e-12)


def test_momentum_update_is_exact_for_known_scalars() -> None:
    params = _params()
    memory = MemoryParams.mirror(params)
    params.semantic.bias[...] = 0.7
    memory.semantic.bias[...] = 0.3
    alpha = 1.0 - 1e-3
    momentum_update(memory, params, alpha)
    np.testing.assert_allclose(memory.semantic.bias, 0.3 + 1e-3 * 0.4, rtol=0, atol=1e-15)


def test_momentum_update_never_touches_encoder() -> None:
    params = _params()
    before = {k: v.copy() for k, v in params.named_arrays().items()}
    momentum_update(MemoryParams.mirror(_params(5)), params, 0.9)
    for name, array in params.named_arrays().items():
        np.testing.assert_array_equal(array, before[name])


@pytest.mark.parametrize("alpha", [1.0, -0.1, 1.5])
def test_momentum_coefficient_range(alpha: float) -> None:
    params = _params()
    with pytest.raises(ConfigurationError):
        momentum_update(MemoryParams.mirror(params), params, alpha)


def test_kink_margin_is_smallest_preactivation() -> None:
    layer = DenseLayer(np.array([[1.0, -2.0]]), np.array([0.5, 0.0]))
    params = EncoderParams(
        backbone=[layer],
        semantic=DenseLayer.zeros(2, 1),
        style=DenseLayer.zeros(2, 1),
        classifier=DenseLayer.zeros(1, 2),
    )
    assert kink_margin(params, np.array([[0.1]])) == pytest.approx(0.2)


def test_checkpoint_round_trip_is_bit_exact(tmp_path: Path) -> None:
    params = _params()
    memory = MemoryParams.mirror(_params(9))
    path = save_checkpoint(tmp_path / "ckpt.npz", params, memory)
    loaded, loaded_memory = load_checkpoint(path)
    assert loaded_memory is not None
    for name, array in params.named_arrays().items():
        np.testing.assert_array_equal(loaded.named_arrays()[name], array)
    for name, array in memory.named_arrays().items():
        np.testing.assert_array_equal(loaded_memory.named_arrays()[name], array)


def test_checkpoint_without_memory(tmp_path: Path) -> None:
    _, memory = load_checkpoint(save_checkpoint(tmp_path / "ckpt.npz", _params()))
    assert memory is None


def test_checkpoint_missing_arrays_is_a_configuration_error(tmp_path: Path) -> None:
    path = tmp_path / "broken.npz"
    np.savez(path, **{"f0.weight": np.ones((2, 2)), "f0.bias": np.ones(2)})
    with pytest.raises(ConfigurationError):
        load_checkpoint(path)
