"""Micro instances for gradient and oracle checks.

Two training domains, a batch of four, two entries per bank and a
three-dimensional embedding: small enough to finite-difference every
parameter, large enough to exercise every loss term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.autodiff import Graph, Tensor
from app.data import Batch
from app.losses import LossBreakdown
from app.model import kink_margin, memory_encode
from app.train import TrainState, compute_losses
from app.types import ContractError, MethodVariant, TrainConfig

MICRO_DOMAINS = (0, 1)
MICRO_BATCH = 4
MICRO_BANK = 2
MICRO_TAU = 0.2
MIN_KINK_MARGIN = 1e-3


def micro_config(**overrides: object) -> TrainConfig:
    values: dict[str, object] = {
        "n_classes": 3,
        "n_domains": 3,
        "per_domain": 8,
        "distractor_dims": 2,
        "hidden_dims": (5,),
        "feature_dim": 4,
        "embed_dim": 3,
        "bank_size": MICRO_BANK,
        "batch_size": MICRO_BATCH,
        "tau": MICRO_TAU,
        "epochs": 1,
        "n_seeds": 1,
    }
    values.update(overrides)
    return TrainConfig(**values)


def unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    rows = rng.standard_normal((n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


@dataclass
class MicroInstance:
    """A warm training state and one batch, ready for a loss evaluation."""

    state: TrainState
    batch: Batch
    memory_semantic: Optional[np.ndarray]

    def losses(self, graph: Graph) -> LossBreakdown:
        return compute_losses(self.state, self.batch, graph, self.memory_semantic)

    def total(self, graph: Graph) -> Tensor:
        return self.losses(graph).total

    @property
    def arrays(self) -> dict[str, np.ndarray]:
        return self.state.params.named_arrays()


def build_micro(
    seed: int,
    variant: MethodVariant = MethodVariant.STEAM,
    *,
    tau: float = MICRO_TAU,
) -> MicroInstance:
    """Random micro instance with banks filled by random unit vectors.

    Inputs are redrawn until every backbone pre-activation sits at least
    ``MIN_KINK_MARGIN`` away from zero.
    """
    rng = np.random.default_rng([seed, 7])
    config = micro_config(variant=variant, tau=tau, seed=seed)
    state = TrainState.create(config, MICRO_DOMAINS, total_steps=10, seed=(seed,))
    if state.style_bank is not None:
        for d in MICRO_DOMAINS:
            state.style_bank.push_rows(np.full(MICRO_BANK, d), unit_rows(rng, MICRO_BANK, config.embed_dim))
    if state.semantic_bank is not None:
        state.semantic_bank.push_rows(unit_rows(rng, MICRO_BANK, config.embed_dim))

    for _ in range(100):
        x = rng.standard_normal((MICRO_BATCH, config.input_dim))
        if kink_margin(state.params, x) > MIN_KINK_MARGIN:
            break
    else:
        raise ContractError(f"seed {seed}: no input clear of relu kinks")

    x_plus = x + 0.1 * rng.standard_normal(x.shape)
    batch = Batch(
        x=x,
        y=rng.integers(0, config.n_classes, MICRO_BATCH),
        d=np.repeat(np.array(MICRO_DOMAINS), MICRO_BATCH // len(MICRO_DOMAINS)),
        x_plus=x_plus,
        index=np.arange(MICRO_BATCH),
    )
    memory_semantic = memory_encode(state.memory, x_plus).c if state.recipe.uses_memory_variants else None
    return MicroInstance(state=state, batch=batch, memory_semantic=memory_semantic)
