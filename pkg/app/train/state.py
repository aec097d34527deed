from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.banks import SemanticBank, StyleBankSet
from app.model import EncoderParams, MemoryParams, init_domain_head, init_from_config
from app.types import TrainConfig

from .optimizer import SGDMomentum, cosine_lr
from .recipes import LossRecipe, VariantRegistry

logger = logging.getLogger("steam.train")


@dataclass
class TrainState:
    """Everything one training run mutates, owned by a single thread.

    Banks only exist for variants that read them.
    """

    config: TrainConfig
    recipe: LossRecipe
    params: EncoderParams
    memory: MemoryParams
    optimizer: SGDMomentum
    domains: tuple[int, ...]
    total_steps: int
    style_bank: Optional[StyleBankSet] = None
    semantic_bank: Optional[SemanticBank] = None
    step: int = 0

    @classmethod
    def create(
        cls,
        config: TrainConfig,
        domains: Sequence[int],
        total_steps: int,
        seed: Sequence[int],
    ) -> "TrainState":
        """Fresh parameters, memory mirror, optimizer and empty banks.

        The domain head draws from its own stream so the shared weights are
        identical across variants for the same seed.
        """
        recipe = VariantRegistry.get(config.variant)
        domains = tuple(sorted(int(d) for d in domains))
        params = init_from_config(config, np.random.default_rng([*seed, 0]))
        if recipe.uses_domain_head:
            params.domain_head = init_domain_head(
                config.embed_dim, len(domains), np.random.default_rng([*seed, 1])
            )
        memory = MemoryParams.mirror(params)
        optimizer = SGDMomentum(
            params.named_arrays(),
            lr=config.lr,
            momentum=config.sgd_momentum,
            weight_decay=config.weight_decay,
        )
        style_bank = (
            StyleBankSet(domains, config.bank_size, config.embed_dim) if recipe.uses_style_bank else None
        )
        semantic_bank = SemanticBank(config.bank_size, config.embed_dim) if recipe.uses_semantic_bank else None
        return cls(
            config=config,
            recipe=recipe,
            params=params,
            memory=memory,
            optimizer=optimizer,
            domains=domains,
            total_steps=total_steps,
            style_bank=style_bank,
            semantic_bank=semantic_bank,
        )

    @property
    def learning_rate(self) -> float:
        if not self.config.cosine_annealing:
            return self.config.lr
        return cosine_lr(self.step, self.total_steps, self.config.lr)
