from __future__ import annotations

import numpy as np

from app.autodiff import Tensor, ops
from app.banks import StyleBankSet
from app.types import ConfigurationError, ContractError, UnknownDomainError


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise ConfigurationError(f"temperature must be positive, got {tau}", key="tau")


def style_contrastive(style: Tensor, domain_ids: np.ndarray, bank: StyleBankSet, tau: float) -> Tensor:
    """Domain-contrastive loss on encoder style features.

    Each sample is pulled towards every entry of its own domain's style bank,
    one at a time, against all entries of the other domains' banks. A term
    for the positive ``v`` is

        -log( e(v) / (e(v) + sum over other-domain entries u of e(u)) )

    with ``e(v) = exp(cos(s_i, v) / tau)``. Other entries of the sample's own
    bank do not appear in its denominator. The result is the mean over every
    (sample, positive) pair in the batch. Bank rows are constants.
    """
    _check_tau(tau)
    if len(bank.domains) < 2:
        raise ContractError("style contrastive loss is undefined with a single domain")
    domain_ids = np.asarray(domain_ids, dtype=np.int64)
    unknown = sorted(set(domain_ids.tolist()) - set(bank.domains))
    if unknown:
        raise UnknownDomainError(f"domains {unknown} have no style bank")
    bank.require_warm()
    rows, owners = bank.stacked()

    positive = (owners[None, :] == domain_ids[:, None]).astype(np.float64)
    negative = 1.0 - positive

    logits = ops.scale(ops.matmul(ops.normalize_rows(style), rows.T), 1.0 / tau)
    # Shift by the largest negative logit of each row, then take each term as
    # logaddexp(z_v, log-sum of negatives) - z_v with its own constant shift.
    # Every log argument is at least 1.
    top_negative = np.where(negative > 0, logits.data, -np.inf).max(axis=1, keepdims=True)
    z = ops.sub(logits, top_negative)
    log_negatives = ops.log(ops.sum_rows(ops.mul(ops.exp(ops.mul(z, negative)), negative)))
    shift = np.maximum(z.data, log_negatives.data)
    pair = ops.add(ops.exp(ops.sub(z, shift)), ops.exp(ops.sub(log_negatives, shift)))
    terms = ops.sub(ops.log(pair), ops.sub(z, shift))
    return ops.scale(ops.sum(ops.mul(terms, positive)), 1.0 / positive.sum())
