"""Alternatives to the jury loss used by the design-choice study.

(The domain-classifier replacement for the style term lives with the
classification loss in ``supervised``.)
"""

from __future__ import annotations

import numpy as np

from app.autodiff import Tensor, ops
from app.types import DimensionError, FeatureBank

from .jury import _require_entries
from .style import _check_tau


def l2_matching_loss(c_enc: Tensor, c_mem: np.ndarray) -> Tensor:
    """Mean squared distance between normalized encoder rows and their memory variants."""
    c_mem = np.asarray(c_mem, dtype=np.float64)
    if c_mem.shape != c_enc.shape:
        raise DimensionError("l2_matching_loss", c_enc.shape, c_mem.shape)
    diff = ops.sub(ops.normalize_rows(c_enc), c_mem)
    return ops.scale(ops.sum(ops.mul(diff, diff)), 1.0 / c_enc.shape[0])


def plain_infonce_loss(c_enc: Tensor, c_mem: np.ndarray, bank: FeatureBank, tau: float) -> Tensor:
    """Instance InfoNCE: the memory variant is the positive, the bank the negatives."""
    _check_tau(tau)
    snapshot = bank.snapshot()
    _require_entries(snapshot)
    c_mem = np.asarray(c_mem, dtype=np.float64)
    if c_mem.shape != c_enc.shape:
        raise DimensionError("plain_infonce_loss", c_enc.shape, c_mem.shape)

    anchor = ops.normalize_rows(c_enc)
    positive = ops.sum_rows(ops.mul(anchor, c_mem))
    negatives = ops.matmul(anchor, snapshot.T)
    log_probs = ops.log_softmax_rows(ops.concat_cols([positive, negatives]), tau)
    first = np.zeros(log_probs.shape)
    first[:, 0] = 1.0
    return ops.scale(ops.sum(ops.mul(log_probs, first)), -1.0 / c_enc.shape[0])
