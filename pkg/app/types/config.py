from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .enums import MethodVariant, ProtocolMode


class TrainConfig(BaseModel):
    """Every hyperparameter of one experiment.

    Defaults are the desk-scale benchmark: 7 classes, 4 domains, 500 samples
    per domain, an MLP backbone (64-64-32) with 16-dim semantic and style
    heads, banks of 256 entries, SGD with momentum and cosine annealing.

    ``batch_size`` is the labeled source batch and must split evenly across
    the source domains (``n_domains - 1`` under leave-one-domain-out). In
    MSDA mode the unlabeled target contributes one more per-domain share on
    top of it.

    Example:
        >>> from app.types import TrainConfig, MethodVariant
        >>> TrainConfig(variant=MethodVariant.VANILLA, epochs=5).bank_size
        256
    """

    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)

    # contrastive / memory
    tau: float = Field(default=0.07, gt=0)
    alpha: float = Field(default=0.999, ge=0, lt=1)
    bank_size: int = Field(default=256, gt=0)

    # optimization
    lr: float = Field(default=0.05, gt=0)
    cosine_annealing: bool = True
    sgd_momentum: float = Field(default=0.9, ge=0, lt=1)
    weight_decay: float = Field(default=0.0, ge=0)
    epochs: int = Field(default=40, ge=0)
    batch_size: int = Field(default=30, gt=0)
    seed: int = 0
    n_seeds: int = Field(default=5, gt=0)

    # method / protocol
    variant: MethodVariant = MethodVariant.STEAM
    mode: ProtocolMode = ProtocolMode.DG
    target_domain: Optional[int] = Field(default=None, ge=0)
    msda_adapt_fraction: float = Field(default=0.5, ge=0, lt=1)
    extended_ablation: bool = False

    # synthetic benchmark
    n_classes: int = Field(default=7, ge=2)
    n_domains: int = Field(default=4, ge=2)
    per_domain: int = Field(default=500, gt=0)
    input_noise: float = Field(default=0.1, ge=0)
    distractor_dims: int = Field(default=8, ge=0)
    style_strength: float = Field(default=1.5, ge=0)
    rotation_spread: float = Field(default=0.3, ge=0)

    # variants of x
    p_same_class: float = Field(default=0.5, ge=0, le=1)
    jitter: float = Field(default=0.05, ge=0)
    dropout_rate: float = Field(default=0.1, ge=0, le=1)

    # architecture
    hidden_dims: tuple[int, ...] = (64, 64)
    feature_dim: int = Field(default=32, gt=0)
    embed_dim: int = Field(default=16, gt=0)
    zero_init_classifier: bool = False

    @field_validator("hidden_dims", mode="before")
    @classmethod
    def _split_hidden_dims(cls, v: object) -> object:
        if isinstance(v, str):
            parts = [p.strip() for p in v.split(",") if p.strip()]
            return tuple(int(p) for p in parts)
        return v

    @field_validator("hidden_dims")
    @classmethod
    def _positive_hidden_dims(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(h <= 0 for h in v):
            raise ValueError("hidden layer widths must be positive")
        return v

    @field_validator("target_domain", mode="before")
    @classmethod
    def _blank_target_is_unset(cls, v: object) -> object:
        if isinstance(v, str) and not v.strip():
            return None
        return v

    @field_validator("tau", "alpha", "lr", "sgd_momentum", "weight_decay", "jitter")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @model_validator(mode="after")
    def _enforce_cross_field_constraints(self) -> "TrainConfig":
        """Reject combinations that cannot run.

        - The source batch splits evenly over the source domains.
        - A style bank is filled from one domain's data, so it cannot be larger
          than a domain.
        - The held-out target must be one of the generated domains.
        """
        if self.batch_size % self.n_sources:
            raise ValueError(
                f"batch_size={self.batch_size} is not divisible by the "
                f"{self.n_sources} source domains"
            )
        if self.bank_size > self.per_domain:
            raise ValueError(
                f"bank_size={self.bank_size} exceeds per_domain={self.per_domain}"
            )
        if self.target_domain is not None and self.target_domain >= self.n_domains:
            raise ValueError(
                f"target_domain={self.target_domain} outside [0, {self.n_domains})"
            )
        return self

    @property
    def n_sources(self) -> int:
        """Labeled source domains per run (one domain is always held out)."""
        return self.n_domains - 1

    @property
    def per_domain_batch(self) -> int:
        return self.batch_size // self.n_sources

    @property
    def input_dim(self) -> int:
        return 2 + self.distractor_dims


def full_scale_defaults(**overrides: object) -> TrainConfig:
    """Config with full-size 2,048-entry banks, lr 0.05 and cosine annealing.

    ``per_domain`` is raised to fit the banks.
    """
    values: dict[str, object] = {
        "bank_size": 2048,
        "per_domain": 2048,
        "lr": 0.05,
        "cosine_annealing": True,
    }
    values.update(overrides)
    return TrainConfig(**values)
