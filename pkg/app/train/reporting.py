"""Metric CSVs, summary tables and the run manifest."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
import orjson
import pandas as pd

from app.types import MethodVariant, RunResult, TrainConfig

RUN_COLUMNS = [
    "variant",
    "target_domain",
    "seed",
    "epoch",
    "l_cls",
    "l_s",
    "l_c",
    "l_o",
    "total",
    "source_acc",
    "target_acc",
]
FINAL_EPOCH = "final"
AVERAGE = "avg"


def runs_frame(runs: Iterable[RunResult]) -> pd.DataFrame:
    """One row per epoch of every run, then one ``final`` row per run.

    Wall-clock time is left out so identical runs give identical files.
    """
    rows: list[dict[str, Any]] = []
    for run in runs:
        key = {"variant": run.variant.value, "target_domain": run.target_domain, "seed": run.seed}
        for record in run.epochs:
            rows.append(
                {
                    **key,
                    "epoch": record.epoch,
                    **record.losses.model_dump(),
                    "source_acc": record.source_acc,
                    "target_acc": record.target_acc,
                }
            )
        rows.append({**key, "epoch": FINAL_EPOCH, "source_acc": run.source_acc, "target_acc": run.target_acc})
    return pd.DataFrame(rows, columns=RUN_COLUMNS)


def write_run_csv(runs: Iterable[RunResult], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    runs_frame(runs).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def accuracy_summary(runs: Sequence[RunResult]) -> pd.DataFrame:
    """Mean and sd over seeds of the final target accuracy.

    Long format: one row per (variant, target), plus an ``avg`` row per
    variant computed from each seed's average over targets.
    """
    frame = pd.DataFrame(
        [
            {"variant": r.variant.value, "target": str(r.target_domain), "seed": r.seed, "acc": r.target_acc}
            for r in runs
        ]
    )
    per_seed_avg = frame.groupby(["variant", "seed"], sort=False, as_index=False)["acc"].mean()
    per_seed_avg["target"] = AVERAGE
    both = pd.concat([frame, per_seed_avg], ignore_index=True)
    summary = (
        both.groupby(["variant", "target"], sort=False)["acc"]
        .agg(mean="mean", sd="std", n_seeds="count")
        .reset_index()
    )
    summary["sd"] = summary["sd"].fillna(0.0)
    return summary


def summary_table(runs: Sequence[RunResult], variants: Optional[Sequence[MethodVariant]] = None) -> pd.DataFrame:
    """Variants as rows, targets then ``avg`` as columns, cells ``mean ± sd`` in percent."""
    summary = accuracy_summary(runs)
    summary["cell"] = [f"{100 * m:.1f} ± {100 * s:.1f}" for m, s in zip(summary["mean"], summary["sd"])]
    table = summary.pivot(index="variant", columns="target", values="cell")
    targets = sorted((c for c in table.columns if c != AVERAGE), key=int) + [AVERAGE]
    order = [v.value for v in variants] if variants else list(dict.fromkeys(summary["variant"]))
    table = table.reindex(index=order, columns=targets)
    table.columns.name = None
    return table


def write_summary_csv(
    runs: Sequence[RunResult],
    path: Path,
    variants: Optional[Sequence[MethodVariant]] = None,
) -> pd.DataFrame:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = summary_table(runs, variants)
    table.to_csv(path, index_label="variant", lineterminator="\n")
    accuracy_summary(runs).to_csv(
        path.with_name(path.stem + "_long.csv"), index=False, float_format="%.17g", lineterminator="\n"
    )
    return table


def write_manifest(
    path: Path,
    config: TrainConfig,
    *,
    seeds: Sequence[int],
    version: str,
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Machine-readable record of what produced a run directory."""
    payload = {
        "version": version,
        "seeds": list(seeds),
        "config": config.model_dump(mode="json"),
        **(dict(extra) if extra else {}),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(
        orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)
    )
    return path


def seed_means(runs: Sequence[RunResult]) -> dict[tuple[str, int], float]:
    """Average target accuracy over targets for every (variant, seed)."""
    buckets: dict[tuple[str, int], list[float]] = {}
    for r in runs:
        buckets.setdefault((r.variant.value, r.seed), []).append(r.target_acc)
    return {k: float(np.mean(v)) for k, v in buckets.items()}
