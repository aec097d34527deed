from __future__ import annotations

from typing import Optional

import numpy as np

from app.banks import SemanticBank, StyleBankSet
from app.data import Batch
from app.types import MethodVariant, TrainConfig
from app.verification import unit_rows


def tiny_config(
    *,
    variant: MethodVariant = MethodVariant.STEAM,
    epochs: int = 2,
    n_domains: int = 3,
    per_domain: int = 24,
    seed: int = 0,
    n_seeds: int = 1,
    **overrides: object,
) -> TrainConfig:
    """Seconds-scale config: 3 classes, small MLP, banks of 4."""
    values: dict[str, object] = {
        "variant": variant,
        "epochs": epochs,
        "n_domains": n_domains,
        "per_domain": per_domain,
        "seed": seed,
        "n_seeds": n_seeds,
        "n_classes": 3,
        "distractor_dims": 2,
        "hidden_dims": (8,),
        "feature_dim": 6,
        "embed_dim": 4,
        "bank_size": 4,
        "batch_size": 2 * (n_domains - 1),
        "tau": 0.2,
        "alpha": 0.9,
    }
    values.update(overrides)
    return TrainConfig(**values)


def warm_style_bank(
    *,
    rng: np.random.Generator,
    domains: tuple[int, ...] = (0, 1, 2),
    size: int = 2,
    dim: int = 3,
) -> StyleBankSet:
    bank = StyleBankSet(domains, size, dim)
    for d in domains:
        bank.push_rows(np.full(size, d), unit_rows(rng, size, dim))
    return bank


def warm_semantic_bank(*, rng: np.random.Generator, size: int = 4, dim: int = 3) -> SemanticBank:
    bank = SemanticBank(size, dim)
    bank.push_rows(unit_rows(rng, size, dim))
    return bank


def make_batch(
    *,
    rng: np.random.Generator,
    input_dim: int = 4,
    domains: tuple[int, ...] = (0, 1),
    per_domain: int = 2,
    n_classes: int = 3,
    y: Optional[np.ndarray] = None,
) -> Batch:
    n = per_domain * len(domains)
    x = rng.standard_normal((n, input_dim))
    return Batch(
        x=x,
        y=rng.integers(0, n_classes, n) if y is None else np.asarray(y),
        d=np.repeat(np.array(domains), per_domain),
        x_plus=x + 0.1 * rng.standard_normal(x.shape),
        index=np.arange(n),
    )
