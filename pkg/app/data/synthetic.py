"""Synthetic multi-domain benchmark.

Every class has a prototype on the unit circle (the semantic coordinates),
shared by all domains. A domain transforms them with its own rotation and
offset, adds within-class noise, and appends ``distractor_dims`` coordinates
that are constant per domain up to the same noise. Within a domain all
classes share the style parameters, so a learned style feature can be
checked against the true domain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.types import ConfigurationError, ContractError, TrainConfig

logger = logging.getLogger("steam.data")

UNLABELED = -1


class DomainSpec(BaseModel):
    """Style parameters of one domain.

    Example:
        >>> DomainSpec(domain_id=0).distractor_dims
        0
    """

    model_config = ConfigDict(frozen=True)

    domain_id: int = Field(ge=0)
    rotation: float = 0.0
    offset: tuple[float, float] = (0.0, 0.0)
    noise_scale: float = Field(default=0.0, ge=0)
    distractor_offset: tuple[float, ...] = ()

    @field_validator("rotation", "noise_scale")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def distractor_dims(self) -> int:
        return len(self.distractor_offset)

    def rotation_matrix(self) -> np.ndarray:
        c, s = np.cos(self.rotation), np.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    def transform(self, semantic: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Map ``(n, 2)`` semantic coordinates into this domain's input space."""
        n = semantic.shape[0]
        core = semantic @ self.rotation_matrix().T + np.asarray(self.offset)
        distractors = np.broadcast_to(np.asarray(self.distractor_offset, dtype=np.float64), (n, self.distractor_dims))
        x = np.concatenate([core, distractors], axis=1)
        if self.noise_scale > 0:
            x = x + rng.normal(0.0, self.noise_scale, size=x.shape)
        return x


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y: Optional[int]
    d: int

    @property
    def labeled(self) -> bool:
        return self.y is not None


@dataclass
class Dataset:
    """Samples stored column-wise. Unlabeled rows carry ``y == UNLABELED``."""

    x: np.ndarray
    y: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.d = np.asarray(self.d, dtype=np.int64)
        if self.x.ndim != 2 or not (len(self.x) == len(self.y) == len(self.d)):
            raise ContractError(f"inconsistent dataset columns {self.x.shape}, {self.y.shape}, {self.d.shape}")
        self._class_pools: Optional[dict[int, np.ndarray]] = None

    def __len__(self) -> int:
        return len(self.y)

    def __getitem__(self, i: int) -> Sample:
        y = int(self.y[i])
        return Sample(x=self.x[i].copy(), y=None if y == UNLABELED else y, d=int(self.d[i]))

    def __iter__(self) -> Iterator[Sample]:
        return (self[i] for i in range(len(self)))

    @property
    def input_dim(self) -> int:
        return self.x.shape[1]

    @property
    def domains(self) -> tuple[int, ...]:
        return tuple(int(d) for d in np.unique(self.d))

    @property
    def labeled(self) -> np.ndarray:
        return self.y != UNLABELED

    def subset(self, index: np.ndarray) -> "Dataset":
        index = np.asarray(index, dtype=np.intp)
        return Dataset(self.x[index], self.y[index], self.d[index])

    def domain(self, domain_id: int) -> "Dataset":
        return self.subset(np.flatnonzero(self.d == domain_id))

    def without_domain(self, domain_id: int) -> "Dataset":
        return self.subset(np.flatnonzero(self.d != domain_id))

    def without_labels(self) -> "Dataset":
        return Dataset(self.x.copy(), np.full(len(self), UNLABELED), self.d.copy())

    @classmethod
    def concat(cls, parts: Sequence["Dataset"]) -> "Dataset":
        parts = [p for p in parts if len(p)]
        if not parts:
            raise ContractError("nothing to concatenate")
        return cls(
            np.concatenate([p.x for p in parts]),
            np.concatenate([p.y for p in parts]),
            np.concatenate([p.d for p in parts]),
        )

    def class_pool(self, label: int) -> np.ndarray:
        """Indices of every labeled sample of ``label``, across all domains."""
        if self._class_pools is None:
            labels = self.y[self.labeled]
            self._class_pools = {
                int(k): np.flatnonzero(self.y == k) for k in np.unique(labels)
            }
        return self._class_pools.get(int(label), np.empty(0, dtype=np.intp))


def class_prototypes(n_classes: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(n_classes) / n_classes
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def default_domain_specs(
    n_domains: int,
    *,
    distractor_dims: int = 8,
    noise_scale: float = 0.1,
    style_strength: float = 1.5,
    rotation_spread: float = 0.3,
    seed: int = 0,
) -> list[DomainSpec]:
    """Evenly spread rotations in ``[-rotation_spread, rotation_spread]``,
    small random offsets, and distractor offsets of scale ``style_strength``."""
    rng = np.random.default_rng([seed, 1])
    rotations = np.linspace(-rotation_spread, rotation_spread, n_domains) if n_domains > 1 else np.zeros(1)
    specs = []
    for d in range(n_domains):
        offset = rng.normal(0.0, 0.1, size=2)
        distractor = rng.normal(0.0, style_strength, size=distractor_dims)
        specs.append(
            DomainSpec(
                domain_id=d,
                rotation=float(rotations[d]),
                offset=(float(offset[0]), float(offset[1])),
                noise_scale=noise_scale,
                distractor_offset=tuple(float(v) for v in distractor),
            )
        )
    return specs


def generate_dataset(
    n_classes: int,
    n_domains: int,
    per_domain: int,
    specs: Sequence[DomainSpec],
    seed: int,
) -> Dataset:
    """Balanced, shuffled samples for every domain; deterministic in ``seed``."""
    if n_domains < 2:
        raise ConfigurationError(f"need at least two domains, got {n_domains}", key="n_domains")
    if n_classes < 1 or per_domain <= 0:
        raise ConfigurationError("class and sample counts must be positive", key="per_domain")
    if len(specs) != n_domains:
        raise ConfigurationError(f"{len(specs)} domain specs for {n_domains} domains", key="n_domains")
    dims = {spec.distractor_dims for spec in specs}
    if len(dims) != 1:
        raise ConfigurationError("all domains must share the distractor dimension", key="distractor_dims")

    rng = np.random.default_rng(seed)
    prototypes = class_prototypes(n_classes)
    xs, ys, ds = [], [], []
    for spec in specs:
        labels = rng.permutation(np.arange(per_domain) % n_classes)
        xs.append(spec.transform(prototypes[labels], rng))
        ys.append(labels)
        ds.append(np.full(per_domain, spec.domain_id))
    dataset = Dataset(np.concatenate(xs), np.concatenate(ys), np.concatenate(ds))
    logger.debug(
        "generated dataset",
        extra={"samples": len(dataset), "domains": n_domains, "classes": n_classes, "seed": seed},
    )
    return dataset


def build_benchmark(config: TrainConfig) -> Dataset:
    """The dataset a config describes (data seed is the run seed)."""
    specs = default_domain_specs(
        config.n_domains,
        distractor_dims=config.distractor_dims,
        noise_scale=config.input_noise,
        style_strength=config.style_strength,
        rotation_spread=config.rotation_spread,
        seed=config.seed,
    )
    return generate_dataset(config.n_classes, config.n_domains, config.per_domain, specs, config.seed)
