"""Reverse-mode differentiation over float64 numpy arrays.

Usage:
    from app.autodiff import Graph, Tensor, ops
"""

from . import ops
from .gradcheck import GradCheckReport, check_gradients, numerical_gradient
from .tensor import Graph, Tensor, backward

__all__ = [
    "Graph",
    "Tensor",
    "backward",
    "ops",
    "GradCheckReport",
    "check_gradients",
    "numerical_gradient",
]
