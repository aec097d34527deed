"""Central finite-difference gradient checking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from app.types import ContractError

from .tensor import Graph, Tensor

DEFAULT_STEP = 1e-5

LossFn = Callable[[Graph], Tensor]


@dataclass(frozen=True)
class GradCheckReport:
    """Comparison of one parameter's analytic and numeric gradient.

    ``worst`` is max |analytic - numeric| / (atol + rtol * |numeric|); the
    check passes when it is at most 1, which is the ``np.allclose`` rule.
    """

    name: str
    worst: float
    max_abs_error: float
    passed: bool


def numerical_gradient(fn: Callable[[], float], array: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    """Central differences of ``fn()`` with respect to every entry of ``array``.

    ``array`` is perturbed in place and restored after each entry, so ``fn``
    must read it on every call.
    """
    if not array.flags.c_contiguous or not array.flags.writeable:
        raise ContractError("numerical_gradient needs a writeable contiguous array")
    flat = array.reshape(-1)
    grad = np.zeros(flat.size, dtype=np.float64)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        plus = fn()
        flat[i] = original - step
        minus = fn()
        flat[i] = original
        grad[i] = (plus - minus) / (2.0 * step)
    return grad.reshape(array.shape)


def check_gradients(
    loss_fn: LossFn,
    arrays: Mapping[str, np.ndarray],
    *,
    step: float = DEFAULT_STEP,
    rtol: float = 1e-4,
    atol: float = 1e-7,
) -> list[GradCheckReport]:
    """Compare ``Graph.backward`` against finite differences.

    ``loss_fn`` builds the loss on the graph it is given and must register
    each entry of ``arrays`` with ``graph.param(name, array)``.
    """
    graph = Graph()
    graph.backward(loss_fn(graph))
    analytic = graph.grads()

    reports = []
    for name, array in arrays.items():
        if name not in analytic:
            raise ContractError(f"loss never registered parameter {name!r}")
        numeric = numerical_gradient(lambda: loss_fn(Graph()).item(), array, step)
        diff = np.abs(analytic[name] - numeric)
        worst = float(np.max(diff / (atol + rtol * np.abs(numeric)), initial=0.0))
        reports.append(
            GradCheckReport(
                name=name,
                worst=worst,
                max_abs_error=float(np.max(diff, initial=0.0)),
                passed=worst <= 1.0,
            )
        )
    return reports
