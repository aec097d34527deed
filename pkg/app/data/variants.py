"""Variants (x⁺) of an anchor: a same-class sample from any domain, or an
augmented copy of the anchor."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.types import TrainConfig

from .synthetic import Dataset, Sample


class VariantPolicy(BaseModel):
    """How variants are drawn.

    Attributes:
        p_same_class: probability of a same-class draw (labeled anchors only).
        jitter: standard deviation of the additive Gaussian noise.
        dropout_rate: probability of zeroing each coordinate.
    """

    model_config = ConfigDict(frozen=True)

    p_same_class: float = Field(default=0.5, ge=0, le=1)
    jitter: float = Field(default=0.05, ge=0)
    dropout_rate: float = Field(default=0.1, ge=0, le=1)

    @classmethod
    def from_config(cls, config: TrainConfig) -> "VariantPolicy":
        return cls(p_same_class=config.p_same_class, jitter=config.jitter, dropout_rate=config.dropout_rate)


def augment(x: np.ndarray, policy: VariantPolicy, rng: np.random.Generator) -> np.ndarray:
    """Gaussian jitter then independent coordinate dropout."""
    x = np.asarray(x, dtype=np.float64)
    noisy = x + policy.jitter * rng.standard_normal(x.shape)
    keep = rng.random(x.shape) >= policy.dropout_rate
    return np.where(keep, noisy, 0.0)


def sample_variant(anchor: Sample, dataset: Dataset, policy: VariantPolicy, rng: np.random.Generator) -> Sample:
    """A semantically identical partner for ``anchor``.

    Unlabeled anchors are always augmented. A same-class draw may return the
    anchor itself; with no same-class candidate the anchor is augmented.
    """
    if anchor.labeled and rng.random() < policy.p_same_class:
        pool = dataset.class_pool(anchor.y)  # type: ignore[arg-type]
        if len(pool):
            return dataset[int(pool[rng.integers(len(pool))])]
    return Sample(x=augment(anchor.x, policy, rng), y=anchor.y, d=anchor.d)
