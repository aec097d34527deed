"""One optimization step and the bank warm-up that precedes training."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from app.autodiff import Graph, ops
from app.data import Batch, Dataset, VariantPolicy, sample_variant
from app.losses import (
    LossBreakdown,
    classification_loss,
    domain_classifier_loss,
    jury_loss,
    l2_matching_loss,
    orthogonality_loss,
    plain_infonce_loss,
    style_contrastive,
    total_loss,
)
from app.model import classify, encode, memory_encode, momentum_update
from app.types import BankColdError, ContractError, LossComponent

from .recipes import SemanticTerm, StyleTerm
from .state import TrainState

logger = logging.getLogger("steam.train")


def _draw(rng: np.random.Generator, members: np.ndarray, n: int) -> np.ndarray:
    order = np.concatenate([rng.permutation(members) for _ in range(-(-n // len(members)))])
    return order[:n]


def warm_up_banks(
    state: TrainState,
    dataset: Dataset,
    policy: VariantPolicy,
    rng: np.random.Generator,
) -> TrainState:
    """Fill every bank the variant reads with memory features.

    Each style bank receives ``bank_size`` style features of its own domain;
    the semantic bank receives ``bank_size`` semantic features of variants
    drawn evenly from all domains. Warm-up does not advance the schedule.
    """
    config = state.config
    batch = max(config.batch_size, 1)
    if state.style_bank is not None:
        for d in state.style_bank.domains:
            members = np.flatnonzero(dataset.d == d)
            if members.size == 0:
                raise BankColdError(f"no samples of domain {d} to warm its style bank")
            index = _draw(rng, members, config.bank_size)
            for lo in range(0, len(index), batch):
                rows = memory_encode(state.memory, dataset.x[index[lo : lo + batch]]).s
                state.style_bank.push_rows(np.full(len(rows), d), rows)
    if state.semantic_bank is not None:
        index = _draw(rng, np.arange(len(dataset)), config.bank_size)
        for lo in range(0, len(index), batch):
            x_plus = np.stack(
                [sample_variant(dataset[i], dataset, policy, rng).x for i in index[lo : lo + batch]]
            )
            state.semantic_bank.push_rows(memory_encode(state.memory, x_plus).c)
    logger.debug(
        "banks warmed",
        extra={"style": repr(state.style_bank), "semantic": repr(state.semantic_bank)},
    )
    return state


def compute_losses(
    state: TrainState,
    batch: Batch,
    graph: Graph,
    memory_semantic: Optional[np.ndarray] = None,
) -> LossBreakdown:
    """Forward pass and every loss the variant enables, read from bank snapshots.

    Unlabeled rows never reach the classification term. Memory semantic
    features of the variants are computed here unless passed in.
    """
    recipe = state.recipe
    tau = state.config.tau
    enc = encode(state.params, batch.x, graph)

    labeled = np.flatnonzero(batch.labeled)
    if labeled.size == 0:
        raise ContractError("a batch needs at least one labeled row")
    semantic = enc.c if labeled.size == len(batch) else ops.take_rows(enc.c, labeled)
    logits = classify(state.params.classifier, semantic, graph)
    components = {LossComponent.CLS: classification_loss(logits, batch.y[labeled])}

    if recipe.style is StyleTerm.CONTRASTIVE:
        if state.style_bank is None or not state.style_bank.is_warm:
            raise BankColdError("style banks must be warmed before training")
        components[LossComponent.STYLE] = style_contrastive(enc.s, batch.d, state.style_bank, tau)
    elif recipe.style is StyleTerm.DOMAIN_CLASSIFIER:
        head = state.params.domain_head
        if head is None:
            raise ContractError("domain-classifier variant needs a domain head")
        components[LossComponent.STYLE] = domain_classifier_loss(
            enc.s,
            batch.d,
            graph.param("domain_head.weight", head.weight),
            graph.param("domain_head.bias", head.bias),
            state.domains,
        )

    if recipe.semantic is not None:
        if memory_semantic is None:
            memory_semantic = memory_encode(state.memory, batch.x_plus).c
        if recipe.semantic is SemanticTerm.JURY:
            components[LossComponent.SEMANTIC] = jury_loss(enc.c, memory_semantic, state.semantic_bank, tau)
        elif recipe.semantic is SemanticTerm.INFONCE:
            components[LossComponent.SEMANTIC] = plain_infonce_loss(
                enc.c, memory_semantic, state.semantic_bank, tau
            )
        else:
            components[LossComponent.SEMANTIC] = l2_matching_loss(enc.c, memory_semantic)

    if recipe.orthogonal:
        components[LossComponent.ORTHOGONAL] = orthogonality_loss(enc.c, enc.s)

    return total_loss(components, recipe.components)


def train_step(state: TrainState, batch: Batch) -> tuple[TrainState, LossBreakdown]:
    """Forward, losses, backward, SGD, momentum update, then bank pushes.

    Memory features are taken before the update and pushed after it, so no
    sample is its own bank entry within the step.
    """
    recipe = state.recipe
    memory_style = memory_encode(state.memory, batch.x).s if recipe.uses_style_bank else None
    memory_semantic = (
        memory_encode(state.memory, batch.x_plus).c if recipe.uses_memory_variants else None
    )

    graph = Graph()
    breakdown = compute_losses(state, batch, graph, memory_semantic)
    graph.backward(breakdown.total)
    state.optimizer.step(graph.grads(), state.learning_rate)
    momentum_update(state.memory, state.params, state.config.alpha)

    if state.style_bank is not None and memory_style is not None:
        state.style_bank.push_rows(batch.d, memory_style)
    if state.semantic_bank is not None and memory_semantic is not None:
        state.semantic_bank.push_rows(memory_semantic)
    state.step += 1
    return state, breakdown
