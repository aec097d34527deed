from __future__ import annotations

from typing import Sequence

import numpy as np

from app.autodiff import Tensor, ops
from app.types import DimensionError, LabelRangeError, UnknownDomainError


def one_hot(labels: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((len(labels), n))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def classification_loss(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean cross-entropy of ``logits`` against integer ``labels``."""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or logits.shape[0] != labels.shape[0]:
        raise DimensionError("classification_loss", logits.shape, labels.shape)
    n_classes = logits.shape[1]
    bad = labels[(labels < 0) | (labels >= n_classes)]
    if bad.size:
        raise LabelRangeError(f"labels {sorted(set(bad.tolist()))} outside [0, {n_classes})")
    picked = ops.mul(ops.log_softmax_rows(logits), one_hot(labels, n_classes))
    return ops.scale(ops.sum(picked), -1.0 / labels.shape[0])


def domain_classifier_loss(
    style: Tensor,
    domain_ids: np.ndarray,
    head_weight: Tensor,
    head_bias: Tensor,
    domains: Sequence[int],
) -> Tensor:
    """Cross-entropy of a linear domain head on the style features.

    ``domains`` lists the domain ids the head predicts, in output order.
    """
    index = {int(d): k for k, d in enumerate(domains)}
    try:
        targets = np.array([index[int(d)] for d in domain_ids], dtype=np.int64)
    except KeyError as e:
        raise UnknownDomainError(f"domain {e.args[0]} is not predicted by the domain head") from None
    logits = ops.add(ops.matmul(style, head_weight), head_bias)
    return classification_loss(logits, targets)
