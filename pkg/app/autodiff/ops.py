"""Differentiable primitives over float64 numpy arrays.

Every function takes ``Tensor`` (or anything ``np.asarray`` accepts, which
becomes a constant) and returns a ``Tensor``. A result joins the graph of its
trainable inputs and carries a closure that pushes its adjoint to them.
Results computed only from constants stay constants.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from app.types import (
    ConfigurationError,
    ContractError,
    DegenerateVectorError,
    DimensionError,
    DomainOfDefinitionError,
)

from .tensor import BackwardFn, Tensor

logger = logging.getLogger("steam.autodiff")

EPSILON = 1e-12


def as_tensor(value: object) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _result(data: np.ndarray, parents: Sequence[Tensor], backward: BackwardFn) -> Tensor:
    tracked = [p for p in parents if p.requires_grad]
    if not tracked:
        return Tensor(data)
    graph = tracked[0].graph
    if graph is None or any(p.graph is not graph for p in tracked):
        raise ContractError("inputs belong to different graphs")
    out = Tensor(data, requires_grad=True)
    out._parents = tuple(parents)
    out._backward = backward
    graph.record(out)
    return out


def _unbroadcast(adjoint: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``adjoint`` back down to ``shape`` after numpy broadcasting."""
    while adjoint.ndim > len(shape):
        adjoint = adjoint.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and adjoint.shape[axis] != 1:
            adjoint = adjoint.sum(axis=axis, keepdims=True)
    return adjoint


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def _require_matrix(op: str, t: Tensor) -> None:
    if t.ndim != 2:
        raise DimensionError(op, t.shape)


# elementwise


def add(a: object, b: object) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(g, a.shape))
        b.accumulate(_unbroadcast(g, b.shape))

    return _result(a.data + b.data, (a, b), _backward)


def sub(a: object, b: object) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(g, a.shape))
        b.accumulate(_unbroadcast(-g, b.shape))

    return _result(a.data - b.data, (a, b), _backward)


def mul(a: object, b: object) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(g * b.data, a.shape))
        b.accumulate(_unbroadcast(g * a.data, b.shape))

    return _result(a.data * b.data, (a, b), _backward)


def scale(a: object, factor: float) -> Tensor:
    a = as_tensor(a)
    factor = float(factor)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g * factor)

    return _result(a.data * factor, (a,), _backward)


def relu(a: object) -> Tensor:
    """max(a, 0); the adjoint at exactly 0 is 0."""
    a = as_tensor(a)
    mask = a.data > 0

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g * mask)

    return _result(np.where(mask, a.data, 0.0), (a,), _backward)


def exp(a: object) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g * out)

    return _result(out, (a,), _backward)


def log(a: object) -> Tensor:
    a = as_tensor(a)
    if np.any(a.data <= 0):
        raise DomainOfDefinitionError(f"log of non-positive value (min {a.data.min():.3g})")

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g / a.data)

    return _result(np.log(a.data), (a,), _backward)


# structural


def _matmul_adjoints(a: np.ndarray, b: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return g @ b.T, a.T @ g


def matmul(a: object, b: object) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError("matmul", a.shape, b.shape)

    def _backward(g: np.ndarray) -> None:
        ga, gb = _matmul_adjoints(a.data, b.data, g)
        a.accumulate(ga)
        b.accumulate(gb)

    return _result(a.data @ b.data, (a, b), _backward)


def transpose(a: object) -> Tensor:
    a = as_tensor(a)
    _require_matrix("transpose", a)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g.T)

    return _result(a.data.T.copy(), (a,), _backward)


def reshape(a: object, shape: tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise DimensionError("reshape", a.shape, tuple(shape)) from None

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g.reshape(a.shape))

    return _result(out.copy(), (a,), _backward)


def concat_rows(parts: Sequence[object]) -> Tensor:
    tensors = [as_tensor(p) for p in parts]
    if not tensors:
        raise ContractError("concat_rows needs at least one input")
    for t in tensors:
        _require_matrix("concat_rows", t)
        if t.shape[1] != tensors[0].shape[1]:
            raise DimensionError("concat_rows", tensors[0].shape, t.shape)
    bounds = np.cumsum([0] + [t.shape[0] for t in tensors])

    def _backward(g: np.ndarray) -> None:
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            t.accumulate(g[lo:hi])

    return _result(np.concatenate([t.data for t in tensors], axis=0), tensors, _backward)


def concat_cols(parts: Sequence[object]) -> Tensor:
    tensors = [as_tensor(p) for p in parts]
    if not tensors:
        raise ContractError("concat_cols needs at least one input")
    for t in tensors:
        _require_matrix("concat_cols", t)
        if t.shape[0] != tensors[0].shape[0]:
            raise DimensionError("concat_cols", tensors[0].shape, t.shape)
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def _backward(g: np.ndarray) -> None:
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            t.accumulate(g[:, lo:hi])

    return _result(np.concatenate([t.data for t in tensors], axis=1), tensors, _backward)


def take_rows(a: object, index: np.ndarray) -> Tensor:
    """Gather rows; repeated indices accumulate on the way back."""
    a = as_tensor(a)
    _require_matrix("take_rows", a)
    index = np.asarray(index, dtype=np.intp)

    def _backward(g: np.ndarray) -> None:
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        a.accumulate(full)

    return _result(a.data[index], (a,), _backward)


# reductions


def sum(a: object) -> Tensor:  # noqa: A001
    a = as_tensor(a)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(np.broadcast_to(g, a.shape).copy())

    return _result(np.asarray(a.data.sum()), (a,), _backward)


def sum_rows(a: object) -> Tensor:
    """Row sums as an ``(m, 1)`` column."""
    a = as_tensor(a)
    _require_matrix("sum_rows", a)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(np.broadcast_to(g, a.shape).copy())

    return _result(a.data.sum(axis=1, keepdims=True), (a,), _backward)


def mean(a: object) -> Tensor:
    a = as_tensor(a)
    if a.size == 0:
        raise ContractError("mean of an empty tensor")
    return scale(sum(a), 1.0 / a.size)


# normalization and similarity


def normalize_rows(a: object, eps: float = EPSILON) -> Tensor:
    """Scale each row to unit L2 norm."""
    a = as_tensor(a)
    _require_matrix("normalize_rows", a)
    norms = np.sqrt((a.data * a.data).sum(axis=1, keepdims=True))
    if np.any(norms < eps):
        raise DegenerateVectorError(f"row norm below {eps:g} (min {norms.min():.3g})")
    out = a.data / norms

    def _backward(g: np.ndarray) -> None:
        radial = (g * out).sum(axis=1, keepdims=True)
        a.accumulate((g - out * radial) / norms)

    return _result(out, (a,), _backward)


def cosine_similarity(a: object, b: object, eps: float = EPSILON) -> Tensor:
    """aᵀb / (‖a‖‖b‖) for two vectors of equal length."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError("cosine_similarity", a.shape, b.shape)
    na = float(np.sqrt(a.data @ a.data))
    nb = float(np.sqrt(b.data @ b.data))
    if na < eps or nb < eps:
        raise DegenerateVectorError(f"vector norm below {eps:g}")
    cos = float(a.data @ b.data) / (na * nb)

    def _backward(g: np.ndarray) -> None:
        a.accumulate(g * (b.data / (na * nb) - cos * a.data / (na * na)))
        b.accumulate(g * (a.data / (na * nb) - cos * b.data / (nb * nb)))

    return _result(np.asarray(cos), (a, b), _backward)


def _check_temperature(temperature: float) -> float:
    temperature = float(temperature)
    if not temperature > 0 or not np.isfinite(temperature):
        raise ConfigurationError(f"temperature must be positive, got {temperature}", key="tau")
    return temperature


def softmax_rows(x: object, temperature: float = 1.0) -> Tensor:
    """Row-wise softmax of ``x / temperature`` with max subtraction."""
    tau = _check_temperature(temperature)
    x = as_tensor(x)
    _require_matrix("softmax_rows", x)
    z = x.data / tau
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=1, keepdims=True)

    def _backward(g: np.ndarray) -> None:
        inner = (g * out).sum(axis=1, keepdims=True)
        x.accumulate(out * (g - inner) / tau)

    return _result(out, (x,), _backward)


def log_softmax_rows(x: object, temperature: float = 1.0) -> Tensor:
    """Row-wise log-softmax of ``x / temperature`` in log-sum-exp form."""
    tau = _check_temperature(temperature)
    x = as_tensor(x)
    _require_matrix("log_softmax_rows", x)
    z = x.data / tau
    z = z - z.max(axis=1, keepdims=True)
    out = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    probs = np.exp(out)

    def _backward(g: np.ndarray) -> None:
        x.accumulate((g - probs * g.sum(axis=1, keepdims=True)) / tau)

    return _result(out, (x,), _backward)
