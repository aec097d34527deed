"""Tensor and Graph: the reverse-mode core.

A ``Graph`` is a dynamic tape. Every trainable leaf and every operation
result that depends on one is appended to ``Graph.nodes`` when it is
created, so insertion order is a topological order and ``backward`` only
has to walk the tape in reverse. Tensors built purely from constants never
touch a graph and never allocate gradient storage.

A new graph is built for every training step; graphs are not reused.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from app.types import ContractError

logger = logging.getLogger("steam.autodiff")

BackwardFn = Callable[[np.ndarray], None]


class Tensor:
    """Dense float64 array with an optional gradient accumulator.

    Attributes:
        data: the values, always float64.
        grad: same-shape accumulator, ``None`` until ``backward`` reaches the
            node (and forever ``None`` for constants).
        requires_grad: whether adjoints flow into this tensor.
        graph: owning graph, ``None`` for constants.
        node_id: position on the owning graph's tape.
    """

    __slots__ = (
        "data",
        "grad",
        "requires_grad",
        "graph",
        "node_id",
        "name",
        "_parents",
        "_backward",
    )

    def __init__(self, data: object, *, requires_grad: bool = False, name: Optional[str] = None) -> None:
        self.data: np.ndarray = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.graph: Optional[Graph] = None
        self.node_id: int = -1
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[BackwardFn] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single value, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        """Read-only view of the values."""
        view = self.data.view()
        view.flags.writeable = False
        return view

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def accumulate(self, adjoint: np.ndarray) -> None:
        """Add ``adjoint`` into ``grad``; a no-op for constants."""
        if not self.requires_grad:
            return
        if adjoint.shape != self.data.shape:
            raise ContractError(
                f"adjoint shape {adjoint.shape} does not match tensor shape {self.data.shape}"
            )
        if self.grad is None:
            self.grad = np.array(adjoint, dtype=np.float64, copy=True)
        else:
            self.grad += adjoint

    def backward(self) -> "Graph":
        if self.graph is None:
            raise ContractError("backward() called on a tensor that is not part of a graph")
        return self.graph.backward(self)

    # Operator sugar; the real work lives in ops.
    def __add__(self, other: object) -> "Tensor":
        from . import ops

        return ops.add(self, other)

    def __radd__(self, other: object) -> "Tensor":
        from . import ops

        return ops.add(other, self)

    def __sub__(self, other: object) -> "Tensor":
        from . import ops

        return ops.sub(self, other)

    def __rsub__(self, other: object) -> "Tensor":
        from . import ops

        return ops.sub(other, self)

    def __mul__(self, other: object) -> "Tensor":
        from . import ops

        return ops.mul(self, other)

    def __rmul__(self, other: object) -> "Tensor":
        from . import ops

        return ops.mul(other, self)

    def __neg__(self) -> "Tensor":
        from . import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other: object) -> "Tensor":
        from . import ops

        return ops.matmul(self, other)

    @property
    def T(self) -> "Tensor":
        from . import ops

        return ops.transpose(self)

    def __repr__(self) -> str:
        kind = "param" if self.requires_grad and not self._parents else "node" if self.graph else "const"
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor({kind}{label}, shape={self.shape})"


class Graph:
    """Ordered tape of one computation.

    Example:
        >>> import numpy as np
        >>> from app.autodiff import Graph, ops
        >>> g = Graph()
        >>> w = g.param("w", np.array([1.0, 2.0]))
        >>> loss = ops.sum(ops.mul(w, w))
        >>> _ = g.backward(loss)
        >>> w.grad.tolist()
        [2.0, 4.0]
    """

    def __init__(self) -> None:
        self.nodes: list[Tensor] = []
        self._params: dict[str, Tensor] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def param(self, name: str, array: np.ndarray) -> Tensor:
        """Trainable leaf for ``array``; one leaf per name per graph."""
        leaf = self._params.get(name)
        if leaf is None:
            leaf = Tensor(array, requires_grad=True, name=name)
            self.record(leaf)
            self._params[name] = leaf
        return leaf

    def leaf(self, array: object, name: Optional[str] = None) -> Tensor:
        """Anonymous trainable leaf (not tracked by ``grads``)."""
        leaf = Tensor(array, requires_grad=True, name=name)
        self.record(leaf)
        return leaf

    def record(self, tensor: Tensor) -> Tensor:
        tensor.graph = self
        tensor.node_id = len(self.nodes)
        self.nodes.append(tensor)
        return tensor

    @property
    def params(self) -> dict[str, Tensor]:
        return dict(self._params)

    def backward(self, loss: Tensor) -> "Graph":
        """Populate ``grad`` on every node the scalar ``loss`` depends on."""
        if loss.graph is not self:
            raise ContractError("loss does not belong to this graph")
        if loss.data.size != 1:
            raise ContractError(f"backward root must be scalar, got shape {loss.shape}")

        for node in self.nodes:
            node.grad = None
        loss.grad = np.ones_like(loss.data)

        for node in reversed(self.nodes[: loss.node_id + 1]):
            if node.grad is None or node._backward is None:
                continue
            node._backward(node.grad)

        logger.debug("backward done", extra={"nodes": len(self.nodes), "params": len(self._params)})
        return self

    def grads(self) -> dict[str, np.ndarray]:
        """Adjoints of every named parameter; zeros where the loss did not reach."""
        return {
            name: leaf.grad if leaf.grad is not None else np.zeros_like(leaf.data)
            for name, leaf in self._params.items()
        }


def backward(loss: Tensor) -> Graph:
    """Run reverse-mode differentiation from a scalar loss."""
    return loss.backward()
