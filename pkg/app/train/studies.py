"""Multi-seed studies: ablation, design choices, and MSDA against DG.

Runs are independent, so they are fanned out over a thread pool; results
come back in job order regardless of the worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
import pandas as pd

from app.data import Dataset, build_benchmark
from app.types import (
    ABLATION_VARIANTS,
    DESIGN_VARIANTS,
    EXTENDED_ABLATION_VARIANTS,
    MethodVariant,
    ProtocolMode,
    RunResult,
    TrainConfig,
)

from .protocols import run_dg_target, run_msda_target, target_domains
from .reporting import seed_means, summary_table

logger = logging.getLogger("steam.train")

RunFn = Callable[[TrainConfig, Dataset, int, Optional[Path]], RunResult]


@dataclass
class StudyResult:
    """Runs of a study, its summary table and the directional checks it reports."""

    name: str
    variants: tuple[MethodVariant, ...]
    runs: list[RunResult]
    table: pd.DataFrame
    checks: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class _Job:
    config: TrainConfig
    target: int
    run: RunFn


def seed_list(config: TrainConfig) -> list[int]:
    return [config.seed + i for i in range(config.n_seeds)]


def _execute(jobs: list[_Job], datasets: dict[int, Dataset], workers: int, checkpoint_dir: Optional[Path]) -> list[RunResult]:
    def work(job: _Job) -> RunResult:
        return job.run(job.config, datasets[job.config.seed], job.target, checkpoint_dir)

    if workers <= 1:
        return [work(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, jobs))


def _datasets(config: TrainConfig, seeds: Sequence[int]) -> dict[int, Dataset]:
    return {s: build_benchmark(config.model_copy(update={"seed": s})) for s in seeds}


def run_variants(
    name: str,
    config: TrainConfig,
    variants: Sequence[MethodVariant],
    *,
    mode: ProtocolMode = ProtocolMode.DG,
    workers: int = 1,
    checkpoint_dir: Optional[Path] = None,
) -> list[RunResult]:
    """Every (variant, seed, target) run on a shared seed set and shared data."""
    seeds = seed_list(config)
    targets = target_domains(config)
    run = run_dg_target if mode is ProtocolMode.DG else run_msda_target
    jobs = [
        _Job(config.model_copy(update={"variant": v, "seed": s, "mode": mode}), t, run)
        for v in variants
        for s in seeds
        for t in targets
    ]
    logger.info("study started", extra={"study": name, "jobs": len(jobs), "workers": workers})
    return _execute(jobs, _datasets(config, seeds), workers, checkpoint_dir)


def _paired(runs: Sequence[RunResult], better: str, base: str) -> dict[str, Any]:
    means = seed_means(runs)
    seeds = sorted({s for (_, s) in means})
    wins = sum(means[(better, s)] >= means[(base, s)] for s in seeds)
    margin = float(np.mean([means[(better, s)] - means[(base, s)] for s in seeds]))
    return {"seeds_at_or_above": int(wins), "n_seeds": len(seeds), "mean_margin": margin}


def _style_check(runs: Sequence[RunResult], variant: MethodVariant) -> dict[str, Any]:
    picked = [r.style for r in runs if r.variant is variant and r.style is not None]
    if not picked:
        return {}
    domain = float(np.mean([s.domain_acc for s in picked]))
    klass = float(np.mean([s.class_acc for s in picked]))
    return {"domain_acc": domain, "class_acc": klass, "domain_above_class": domain > klass}


def ablation_checks(runs: Sequence[RunResult]) -> dict[str, Any]:
    """Directional expectations of the ablation, reported rather than enforced."""
    steam = _paired(runs, MethodVariant.STEAM.value, MethodVariant.VANILLA.value)
    checks: dict[str, Any] = {
        "steam_vs_vanilla": {**steam, "passed": steam["mean_margin"] >= 0.02},
        "style_diagnostic": _style_check(runs, MethodVariant.STEAM),
    }
    for v in (MethodVariant.VANILLA_STYLE, MethodVariant.VANILLA_SEMANTIC):
        paired = _paired(runs, v.value, MethodVariant.VANILLA.value)
        needed = max(paired["n_seeds"] - 1, 1)
        checks[f"{v.value}_vs_vanilla"] = {**paired, "passed": paired["seeds_at_or_above"] >= needed}
    return checks


def run_ablation(
    config: TrainConfig,
    *,
    workers: int = 1,
    checkpoint_dir: Optional[Path] = None,
) -> StudyResult:
    """Which loss terms matter: the four ablation rows (six when extended)."""
    variants = EXTENDED_ABLATION_VARIANTS if config.extended_ablation else ABLATION_VARIANTS
    runs = run_variants("ablation", config, variants, workers=workers, checkpoint_dir=checkpoint_dir)
    return StudyResult(
        name="ablation",
        variants=variants,
        runs=runs,
        table=summary_table(runs, variants),
        checks=ablation_checks(runs),
    )


def run_design_study(
    config: TrainConfig,
    *,
    workers: int = 1,
    checkpoint_dir: Optional[Path] = None,
) -> StudyResult:
    """The full recipe against its three design alternatives."""
    runs = run_variants("design-study", config, DESIGN_VARIANTS, workers=workers, checkpoint_dir=checkpoint_dir)
    steam_time = np.mean([r.wall_clock for r in runs if r.variant is MethodVariant.STEAM]) or 1.0
    slowest = max(
        float(np.mean([r.wall_clock for r in runs if r.variant is v])) for v in DESIGN_VARIANTS
    )
    return StudyResult(
        name="design-study",
        variants=DESIGN_VARIANTS,
        runs=runs,
        table=summary_table(runs, DESIGN_VARIANTS),
        checks={"runtime_ratio_to_steam": float(slowest / steam_time)},
    )


def run_msda_study(
    config: TrainConfig,
    *,
    workers: int = 1,
    checkpoint_dir: Optional[Path] = None,
) -> StudyResult:
    """MSDA runs of ``config.variant`` next to paired DG runs of the same seeds."""
    variant = (config.variant,)
    msda = run_variants("msda", config, variant, mode=ProtocolMode.MSDA, workers=workers, checkpoint_dir=checkpoint_dir)
    dg = run_variants("msda-baseline", config, variant, mode=ProtocolMode.DG, workers=workers)
    msda_means = seed_means(msda)
    dg_means = seed_means(dg)
    wins = sum(msda_means[k] >= dg_means[k] for k in msda_means)
    margin = float(np.mean([msda_means[k] - dg_means[k] for k in msda_means]))
    return StudyResult(
        name="msda",
        variants=variant,
        runs=msda,
        table=summary_table(msda, variant),
        checks={
            "msda_vs_dg": {
                "seeds_at_or_above": int(wins),
                "n_seeds": len(msda_means),
                "mean_margin": margin,
                "passed": margin >= 0.0,
            },
            "dg_table": summary_table(dg, variant).to_dict(orient="index"),
        },
    )
