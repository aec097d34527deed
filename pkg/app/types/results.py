from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .enums import MethodVariant, ProtocolMode


class LossValues(BaseModel):
    """Plain-float snapshot of a loss breakdown (no graph attached).

    Disabled components are exactly 0.0.
    """

    l_cls: float = 0.0
    l_s: float = 0.0
    l_c: float = 0.0
    l_o: float = 0.0
    total: float = 0.0


class EpochRecord(BaseModel):
    """Mean losses over one epoch plus accuracies at its end."""

    epoch: int
    losses: LossValues
    source_acc: float = Field(ge=0, le=1)
    target_acc: float = Field(ge=0, le=1)


class EvalResult(BaseModel):
    """Accuracy and confusion counts of one evaluation split.

    Attributes:
        accuracy: correct / total.
        confusion: ``confusion[true][predicted]`` counts, n_classes x n_classes.
        total: number of evaluated samples.
    """

    model_config = ConfigDict(frozen=True)

    accuracy: float = Field(ge=0, le=1)
    confusion: list[list[int]]
    total: int


class StyleDiagnostic(BaseModel):
    """Nearest-centroid accuracies on style features.

    High ``domain_acc`` means styles cluster by domain; low ``class_acc``
    means styles carry little class information.
    """

    domain_acc: float = Field(ge=0, le=1)
    class_acc: float = Field(ge=0, le=1)


class RunResult(BaseModel):
    """Outcome of one training run (one variant, one target, one seed).

    Example:
        >>> from app.types import RunResult
        >>> RunResult(variant="steam", mode="dg", target_domain=0, seed=0,
        ...           target_acc=0.5, source_acc=0.9).target_acc
        0.5
    """

    variant: MethodVariant
    mode: ProtocolMode
    target_domain: int
    seed: int
    epochs: list[EpochRecord] = Field(default_factory=list)
    target_acc: float = Field(ge=0, le=1)
    source_acc: float = Field(ge=0, le=1)
    target_eval: Optional[EvalResult] = None
    style: Optional[StyleDiagnostic] = None
    wall_clock: float = 0.0
