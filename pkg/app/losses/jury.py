from __future__ import annotations

import numpy as np

from app.autodiff import Tensor, ops
from app.banks import UNIT_TOLERANCE
from app.types import BankColdError, DimensionError, FeatureBank, NonUnitVectorError

from .style import _check_tau


def _require_entries(snapshot: np.ndarray) -> None:
    if snapshot.shape[0] == 0:
        raise BankColdError("semantic bank is empty; warm up before reading")


def jury_distribution(c: object, snapshot: np.ndarray, tau: float) -> Tensor:
    """Softmax over cosine similarities of ``c`` to every bank entry.

    ``c`` is one vector (result ``(B,)``) or a batch of rows (result
    ``(batch, B)``). Differentiable in ``c`` when ``c`` is on a graph.
    """
    _check_tau(tau)
    _require_entries(snapshot)
    c = ops.as_tensor(c)
    single = c.ndim == 1
    rows = ops.reshape(c, (1, c.shape[0])) if single else c
    if rows.shape[1] != snapshot.shape[1]:
        raise DimensionError("jury_distribution", rows.shape, snapshot.shape)
    probs = ops.softmax_rows(ops.matmul(ops.normalize_rows(rows), snapshot.T), tau)
    return ops.reshape(probs, (snapshot.shape[0],)) if single else probs


def jury_loss(c_enc: Tensor, c_mem: np.ndarray, bank: FeatureBank, tau: float) -> Tensor:
    """Cross-entropy between the bank's verdicts on a sample and on its variant.

    The memory variant's distribution over bank entries is the fixed target;
    the encoder's distribution for the anchor is trained to match it. Mean
    over the batch.
    """
    _check_tau(tau)
    snapshot = bank.snapshot()
    _require_entries(snapshot)
    c_mem = np.asarray(c_mem, dtype=np.float64)
    if c_mem.shape != c_enc.shape:
        raise DimensionError("jury_loss", c_enc.shape, c_mem.shape)
    norms = np.sqrt((c_mem * c_mem).sum(axis=1))
    if np.any(np.abs(norms - 1.0) > UNIT_TOLERANCE):
        raise NonUnitVectorError("memory semantic rows must be unit norm")

    target = ops.softmax_rows(c_mem @ snapshot.T, tau).data
    log_probs = ops.log_softmax_rows(ops.matmul(ops.normalize_rows(c_enc), snapshot.T), tau)
    return ops.scale(ops.sum(ops.mul(log_probs, target)), -1.0 / c_enc.shape[0])
