"""Forward passes of the encoder, the memory encoder and the classifier,
plus the momentum update that keeps the memory encoder trailing the
encoder."""

from __future__ import annotations

import logging
from typing import NamedTuple, Optional, Union

import numpy as np

from app.autodiff import Graph, Tensor, ops
from app.types import ConfigurationError, DimensionError

from .params import DenseLayer, EncoderParams, MemoryParams, _EncoderStack

logger = logging.getLogger("steam.model")

ArrayLike = Union[np.ndarray, Tensor]


class Encoding(NamedTuple):
    z: Tensor
    c: Tensor
    s: Tensor


class MemoryEncoding(NamedTuple):
    """Unit-norm constant rows from the memory encoder."""

    c: np.ndarray
    s: np.ndarray


def _leaf(graph: Optional[Graph], name: str, array: np.ndarray) -> Tensor:
    return graph.param(name, array) if graph is not None else Tensor(array)


def dense(x: Tensor, layer: DenseLayer, prefix: str, graph: Optional[Graph] = None) -> Tensor:
    weight = _leaf(graph, f"{prefix}.weight", layer.weight)
    bias = _leaf(graph, f"{prefix}.bias", layer.bias)
    return ops.add(ops.matmul(x, weight), bias)


def _forward(stack: _EncoderStack, x: ArrayLike, graph: Optional[Graph]) -> Encoding:
    x = ops.as_tensor(x)
    if x.ndim != 2 or x.shape[1] != stack.input_dim:
        raise DimensionError("encode", x.shape, (stack.input_dim,))
    z = x
    for i, layer in enumerate(stack.backbone):
        z = ops.relu(dense(z, layer, f"f{i}", graph))
    c = dense(z, stack.semantic, "semantic", graph)
    s = dense(z, stack.style, "style", graph)
    return Encoding(z, c, s)


def encode(params: EncoderParams, x: ArrayLike, graph: Optional[Graph] = None) -> Encoding:
    """Backbone features ``z`` and the semantic/style projections ``c``, ``s``.

    With a graph, parameters become named trainable leaves on it; without
    one, the pass is a plain constant computation.
    """
    return _forward(params, x, graph)


def memory_encode(memory: MemoryParams, x: ArrayLike) -> MemoryEncoding:
    """Same forward as ``encode`` on the memory weights, L2-normalized, no graph."""
    out = _forward(memory, x, None)
    return MemoryEncoding(
        c=ops.normalize_rows(out.c).data,
        s=ops.normalize_rows(out.s).data,
    )


def classify(classifier: DenseLayer, c: ArrayLike, graph: Optional[Graph] = None) -> Tensor:
    """Class logits (no softmax)."""
    c = ops.as_tensor(c)
    if c.ndim != 2 or c.shape[1] != classifier.in_dim:
        raise DimensionError("classify", c.shape, classifier.weight.shape)
    return dense(c, classifier, "classifier", graph)


def momentum_update(memory: MemoryParams, params: EncoderParams, alpha: float) -> MemoryParams:
    """In place: every memory weight becomes ``alpha * memory + (1 - alpha) * encoder``."""
    if not 0.0 <= alpha < 1.0:
        raise ConfigurationError(f"momentum coefficient must lie in [0, 1), got {alpha}", key="alpha")
    source = params.encoder_arrays()
    target = memory.named_arrays()
    if source.keys() != target.keys():
        raise DimensionError("momentum_update", (len(target),), (len(source),))
    for name, mem in target.items():
        enc = source[name]
        if mem.shape != enc.shape:
            raise DimensionError(f"momentum_update[{name}]", mem.shape, enc.shape)
        mem[...] = alpha * mem + (1.0 - alpha) * enc
    return memory


def kink_margin(params: EncoderParams, x: np.ndarray) -> float:
    """Smallest |pre-activation| over the backbone relus for input ``x``.

    Finite-difference checks are only meaningful when this is well above the
    probe step.
    """
    h = np.asarray(x, dtype=np.float64)
    margin = np.inf
    for layer in params.backbone:
        pre = h @ layer.weight + layer.bias
        margin = min(margin, float(np.min(np.abs(pre))))
        h = np.maximum(pre, 0.0)
    return margin
