"""Training loop, protocol runners, studies and reporting.

Usage:
    from app.train import run_dg, run_ablation
"""

from .evaluation import evaluate, nearest_centroid_accuracy, predict_logits, style_cluster_diagnostic
from .optimizer import SGDMomentum, cosine_lr
from .protocols import (
    SOURCE_HOLDOUT,
    msda_train_set,
    run_dg,
    run_dg_target,
    run_msda,
    run_msda_target,
    split_domains,
    target_domains,
    train_run,
)
from .recipes import LossRecipe, SemanticTerm, StyleTerm, VariantRegistry
from .reporting import (
    RUN_COLUMNS,
    accuracy_summary,
    runs_frame,
    seed_means,
    summary_table,
    write_manifest,
    write_run_csv,
    write_summary_csv,
)
from .state import TrainState
from .step import compute_losses, train_step, warm_up_banks
from .studies import (
    StudyResult,
    ablation_checks,
    run_ablation,
    run_design_study,
    run_msda_study,
    run_variants,
    seed_list,
)

__all__ = [
    "SGDMomentum",
    "cosine_lr",
    "LossRecipe",
    "StyleTerm",
    "SemanticTerm",
    "VariantRegistry",
    "TrainState",
    "warm_up_banks",
    "compute_losses",
    "train_step",
    "train_run",
    "evaluate",
    "predict_logits",
    "nearest_centroid_accuracy",
    "style_cluster_diagnostic",
    "SOURCE_HOLDOUT",
    "target_domains",
    "split_domains",
    "msda_train_set",
    "run_dg",
    "run_dg_target",
    "run_msda",
    "run_msda_target",
    "StudyResult",
    "run_variants",
    "run_ablation",
    "run_design_study",
    "run_msda_study",
    "ablation_checks",
    "seed_list",
    "RUN_COLUMNS",
    "runs_frame",
    "accuracy_summary",
    "summary_table",
    "seed_means",
    "write_run_csv",
    "write_summary_csv",
    "write_manifest",
]
