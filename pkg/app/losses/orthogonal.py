from __future__ import annotations

from app.autodiff import Tensor, ops
from app.types import DimensionError


def orthogonality_loss(h_c: Tensor, h_s: Tensor) -> Tensor:
    """Squared Frobenius norm of ``h_cᵀ h_s`` (rows paired by sample)."""
    h_c, h_s = ops.as_tensor(h_c), ops.as_tensor(h_s)
    if h_c.ndim != 2 or h_s.ndim != 2 or h_c.shape[0] != h_s.shape[0]:
        raise DimensionError("orthogonality_loss", h_c.shape, h_s.shape)
    cross = ops.matmul(ops.transpose(h_c), h_s)
    return ops.sum(ops.mul(cross, cross))
