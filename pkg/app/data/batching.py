from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from app.types import ConfigurationError

from .synthetic import UNLABELED, Dataset
from .variants import VariantPolicy, sample_variant

logger = logging.getLogger("steam.data")

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True)
class Batch:
    """Rows of one step plus the paired variant inputs ``x_plus``."""

    x: np.ndarray
    y: np.ndarray
    d: np.ndarray
    x_plus: np.ndarray
    index: np.ndarray

    def __len__(self) -> int:
        return len(self.y)

    @property
    def labeled(self) -> np.ndarray:
        return self.y != UNLABELED


def _domain_order(rng: np.random.Generator, members: np.ndarray, needed: int) -> np.ndarray:
    """Shuffled members, re-shuffled and appended until ``needed`` long."""
    chunks = []
    total = 0
    while total < needed:
        chunks.append(rng.permutation(members))
        total += len(members)
    return np.concatenate(chunks)[:needed]


def batch_iter(
    dataset: Dataset,
    batch_size: int,
    seed: Seed,
    policy: Optional[VariantPolicy] = None,
    *,
    pool: Optional[Dataset] = None,
) -> Iterator[Batch]:
    """One epoch of per-domain balanced batches.

    Every batch holds ``batch_size / n_domains`` rows of each domain present.
    The epoch has ``ceil(largest domain / share)`` batches: when all domains
    have the same size divisible by the share, every sample appears exactly
    once; smaller domains are cycled through fresh permutations otherwise.
    Variants are drawn from ``pool`` (default: ``dataset``).
    """
    domains = dataset.domains
    if not domains:
        raise ConfigurationError("cannot batch an empty dataset")
    if batch_size <= 0 or batch_size % len(domains):
        raise ConfigurationError(
            f"batch size {batch_size} does not split over {len(domains)} domains", key="batch_size"
        )
    share = batch_size // len(domains)
    policy = policy or VariantPolicy()
    pool = pool if pool is not None else dataset
    rng = np.random.default_rng(seed)

    members = {d: np.flatnonzero(dataset.d == d) for d in domains}
    n_batches = -(-max(len(m) for m in members.values()) // share)
    orders = {d: _domain_order(rng, m, n_batches * share) for d, m in members.items()}

    for b in range(n_batches):
        index = np.concatenate([orders[d][b * share : (b + 1) * share] for d in domains])
        x_plus = np.stack([sample_variant(dataset[i], pool, policy, rng).x for i in index])
        yield Batch(
            x=dataset.x[index],
            y=dataset.y[index],
            d=dataset.d[index],
            x_plus=x_plus,
            index=index,
        )
