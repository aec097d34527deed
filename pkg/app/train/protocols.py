"""Leave-one-domain-out generalization and multi-source adaptation runners."""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.data import Dataset, VariantPolicy, batch_iter, build_benchmark
from app.model import save_checkpoint
from app.types import (
    ConfigurationError,
    ContractError,
    EpochRecord,
    LossValues,
    ProtocolMode,
    RunResult,
    TrainConfig,
)

from .evaluation import evaluate, style_cluster_diagnostic
from .state import TrainState
from .step import train_step, warm_up_banks

logger = logging.getLogger("steam.train")

SOURCE_HOLDOUT = 0.1

# rng stream ids under one run key
_STREAM_SPLIT = 10
_STREAM_WARMUP = 11
_STREAM_BATCHES = 12


def split_domains(dataset: Dataset, fraction: float, rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """Per-domain random split; the second part takes ``round(fraction * n)`` of each domain."""
    keep, held = [], []
    for d in dataset.domains:
        members = rng.permutation(np.flatnonzero(dataset.d == d))
        n_held = int(round(fraction * len(members)))
        held.append(members[:n_held])
        keep.append(members[n_held:])
    return dataset.subset(np.sort(np.concatenate(keep))), dataset.subset(np.sort(np.concatenate(held)))


def msda_train_set(sources: Dataset, target_adapt: Dataset) -> Dataset:
    """Labeled sources plus the unlabeled adaptation part of the target.

    Target labels must already be stripped.
    """
    if len(target_adapt) and target_adapt.labeled.any():
        raise ContractError("MSDA target samples must be unlabeled; strip labels before training")
    if len(target_adapt) == 0:
        return sources
    return Dataset.concat([sources, target_adapt])


def target_domains(config: TrainConfig) -> list[int]:
    if config.n_domains < 3:
        raise ConfigurationError(
            f"leave-one-domain-out needs at least 3 domains, got {config.n_domains}", key="n_domains"
        )
    if config.target_domain is not None:
        return [config.target_domain]
    return list(range(config.n_domains))


def _mean_losses(records: list[LossValues]) -> LossValues:
    if not records:
        return LossValues()
    keys = LossValues.model_fields
    return LossValues(**{k: float(np.mean([getattr(r, k) for r in records])) for k in keys})


def train_run(
    config: TrainConfig,
    train_set: Dataset,
    source_val: Dataset,
    target_test: Dataset,
    run_key: Sequence[int],
) -> tuple[TrainState, list[EpochRecord]]:
    """Train one model from scratch and record per-epoch losses and accuracies.

    Domains of ``train_set`` without any labeled row are treated as
    unlabeled targets and add one per-domain share to every batch.
    """
    labeled_domains = {int(d) for d in np.unique(train_set.d[train_set.labeled])}
    unlabeled_domains = [d for d in train_set.domains if d not in labeled_domains]
    share = config.batch_size // len(labeled_domains)
    batch_size = config.batch_size + share * len(unlabeled_domains)
    largest = max(int(np.sum(train_set.d == d)) for d in train_set.domains)
    steps_per_epoch = -(-largest // share)

    state = TrainState.create(config, train_set.domains, steps_per_epoch * config.epochs, run_key)
    policy = VariantPolicy.from_config(config)
    warm_up_banks(state, train_set, policy, np.random.default_rng([*run_key, _STREAM_WARMUP]))

    records: list[EpochRecord] = []
    for epoch in range(config.epochs):
        losses = []
        for batch in batch_iter(train_set, batch_size, [*run_key, _STREAM_BATCHES, epoch], policy):
            _, breakdown = train_step(state, batch)
            losses.append(breakdown.values())
        record = EpochRecord(
            epoch=epoch,
            losses=_mean_losses(losses),
            source_acc=evaluate(state.params, source_val).accuracy,
            target_acc=evaluate(state.params, target_test).accuracy,
        )
        records.append(record)
        logger.info(
            "epoch done",
            extra={
                "variant": config.variant.value,
                "run": list(run_key),
                "epoch": epoch,
                "total": round(record.losses.total, 6),
                "source_acc": record.source_acc,
                "target_acc": record.target_acc,
            },
        )
    return state, records


def _finish(
    config: TrainConfig,
    mode: ProtocolMode,
    target: int,
    state: TrainState,
    records: list[EpochRecord],
    source_val: Dataset,
    target_test: Dataset,
    diagnostic_set: Dataset,
    started: float,
    checkpoint_dir: Optional[Path],
) -> RunResult:
    target_eval = evaluate(state.params, target_test)
    result = RunResult(
        variant=config.variant,
        mode=mode,
        target_domain=target,
        seed=config.seed,
        epochs=records,
        target_acc=target_eval.accuracy,
        source_acc=evaluate(state.params, source_val).accuracy,
        target_eval=target_eval,
        style=style_cluster_diagnostic(state.params, diagnostic_set),
        wall_clock=time.perf_counter() - started,
    )
    if checkpoint_dir is not None:
        name = f"{mode.value}_{config.variant.value}_t{target}_s{config.seed}.npz"
        save_checkpoint(Path(checkpoint_dir) / name, state.params, state.memory)
    logger.info(
        "run done",
        extra={
            "variant": config.variant.value,
            "mode": mode.value,
            "target": target,
            "seed": config.seed,
            "target_acc": result.target_acc,
        },
    )
    return result


def run_dg_target(
    config: TrainConfig,
    dataset: Dataset,
    target: int,
    checkpoint_dir: Optional[Path] = None,
) -> RunResult:
    """Train on every domain but ``target``; test on all of ``target``."""
    started = time.perf_counter()
    run_key = (config.seed, target)
    rng = np.random.default_rng([*run_key, _STREAM_SPLIT])
    train_set, source_val = split_domains(dataset.without_domain(target), SOURCE_HOLDOUT, rng)
    target_test = dataset.domain(target)
    state, records = train_run(config, train_set, source_val, target_test, run_key)
    return _finish(
        config, ProtocolMode.DG, target, state, records, source_val, target_test, dataset, started, checkpoint_dir
    )


def run_msda_target(
    config: TrainConfig,
    dataset: Dataset,
    target: int,
    checkpoint_dir: Optional[Path] = None,
) -> RunResult:
    """Train on labeled sources plus an unlabeled part of ``target``; test on the rest."""
    started = time.perf_counter()
    run_key = (config.seed, target)
    rng = np.random.default_rng([*run_key, _STREAM_SPLIT])
    train_sources, source_val = split_domains(dataset.without_domain(target), SOURCE_HOLDOUT, rng)
    target_test, target_adapt = split_domains(
        dataset.domain(target), config.msda_adapt_fraction, np.random.default_rng([*run_key, _STREAM_SPLIT, 1])
    )
    train_set = msda_train_set(train_sources, target_adapt.without_labels())
    state, records = train_run(config, train_set, source_val, target_test, run_key)
    return _finish(
        config, ProtocolMode.MSDA, target, state, records, source_val, target_test, dataset, started, checkpoint_dir
    )


def run_dg(
    config: TrainConfig,
    dataset: Optional[Dataset] = None,
    checkpoint_dir: Optional[Path] = None,
) -> list[RunResult]:
    """One result per held-out domain (or only ``config.target_domain``)."""
    targets = target_domains(config)
    dataset = dataset if dataset is not None else build_benchmark(config)
    return [run_dg_target(config, dataset, t, checkpoint_dir) for t in targets]


def run_msda(
    config: TrainConfig,
    dataset: Optional[Dataset] = None,
    checkpoint_dir: Optional[Path] = None,
) -> list[RunResult]:
    targets = target_domains(config)
    dataset = dataset if dataset is not None else build_benchmark(config)
    return [run_msda_target(config, dataset, t, checkpoint_dir) for t in targets]
