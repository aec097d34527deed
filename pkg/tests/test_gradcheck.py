import numpy as np
import pytest

from app.autodiff import Graph, check_gradients, numerical_gradient, ops
from app.losses import orthogonality_loss
from app.types import ContractError, MethodVariant
from app.verification import CheckRegistry, build_micro


def test_numerical_gradient_of_quadratic() -> None:
    x = np.array([1.0, -2.0, 0.5])
    grad = numerical_gradient(lambda: float(np.sum(x**2)), x)
    np.testing.assert_allclose(grad, 2.0 * x, rtol=1e-8)
    np.testing.assert_array_equal(x, [1.0, -2.0, 0.5])


def test_numerical_gradient_needs_writeable_contiguous_array() -> None:
    x = np.ones((3, 4))[:, ::2]
    with pytest.raises(ContractError):
        numerical_gradient(lambda: 0.0, x)


def test_check_gradients_reports_every_array(rng: np.random.Generator) -> None:
    arrays = {"a": rng.standard_normal((3, 4)), "b": rng.standard_normal((4, 2))}
    reports = check_gradients(
        lambda g: ops.sum(ops.matmul(g.param("a", arrays["a"]), g.param("b", arrays["b"]))),
        arrays,
        rtol=1e-6,
    )
    assert [r.name for r in reports] == ["a", "b"]
    assert all(r.passed for r in reports)


def test_check_gradients_rejects_unregistered_array(rng: np.random.Generator) -> None:
    arrays = {"a": rng.standard_normal(3), "missing": rng.standard_normal(3)}
    with pytest.raises(ContractError):
        check_gradients(lambda g: ops.sum(g.param("a", arrays["a"])), arrays)


@pytest.mark.parametrize("seed", range(5))
def test_full_step_gradient_matches_finite_differences(seed: int) -> None:
    micro = build_micro(seed)
    reports = check_gradients(micro.total, micro.arrays)
    failed = [r for r in reports if not r.passed]
    assert not failed, failed


@pytest.mark.parametrize(
    "variant",
    [
        MethodVariant.VANILLA,
        MethodVariant.VANILLA_STYLE,
        MethodVariant.VANILLA_SEMANTIC,
        MethodVariant.DOMAIN_CLASSIFIER,
        MethodVariant.L2_MATCHING,
        MethodVariant.CONTRASTIVE,
    ],
)
def test_variant_gradients_match_finite_differences(variant: MethodVariant) -> None:
    micro = build_micro(11, variant)
    assert all(r.passed for r in check_gradients(micro.total, micro.arrays))


@pytest.mark.parametrize("tau", [0.3, 0.5, 1.0])
def test_full_step_gradient_across_temperatures(tau: float) -> None:
    micro = build_micro(3, tau=tau)
    assert all(r.passed for r in check_gradients(micro.total, micro.arrays))


def test_flipped_matmul_adjoint_is_detected(monkeypatch: pytest.MonkeyPatch, rng: np.random.Generator) -> None:
    """Mutation run: a sign error in the matmul adjoint must fail the orthogonality check."""
    h_c, h_s = rng.standard_normal((4, 3)), rng.standard_normal((4, 3))
    arrays = {"h_c": h_c, "h_s": h_s}

    def loss(g: Graph):  # type: ignore[no-untyped-def]
        return orthogonality_loss(g.param("h_c", h_c), g.param("h_s", h_s))

    assert all(r.passed for r in check_gradients(loss, arrays))

    original = ops._matmul_adjoints
    monkeypatch.setattr(ops, "_matmul_adjoints", lambda a, b, g: tuple(-x for x in original(a, b, g)))
    assert not any(r.passed for r in check_gradients(loss, arrays))
    assert not CheckRegistry.get("gradcheck_orthogonality_loss").run().passed
