from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from app.types import ContractError, DimensionError, TrainConfig


@dataclass
class DenseLayer:
    """Affine map ``x @ weight + bias``; weight is ``(in, out)``."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weight = np.ascontiguousarray(self.weight, dtype=np.float64)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[1],):
            raise DimensionError("dense", self.weight.shape, self.bias.shape)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[1]

    @classmethod
    def zeros(cls, in_dim: int, out_dim: int) -> "DenseLayer":
        return cls(np.zeros((in_dim, out_dim)), np.zeros(out_dim))

    def arrays(self, prefix: str) -> dict[str, np.ndarray]:
        return {f"{prefix}.weight": self.weight, f"{prefix}.bias": self.bias}


@dataclass
class _EncoderStack:
    backbone: list[DenseLayer]
    semantic: DenseLayer
    style: DenseLayer

    def _encoder_arrays(self) -> dict[str, np.ndarray]:
        named: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.backbone):
            named.update(layer.arrays(f"f{i}"))
        named.update(self.semantic.arrays("semantic"))
        named.update(self.style.arrays("style"))
        return named

    def _check_chain(self) -> None:
        if not self.backbone:
            raise ContractError("backbone needs at least one layer")
        for prev, layer in zip(self.backbone, self.backbone[1:]):
            if prev.out_dim != layer.in_dim:
                raise DimensionError("backbone", prev.weight.shape, layer.weight.shape)
        feature_dim = self.backbone[-1].out_dim
        for head in (self.semantic, self.style):
            if head.in_dim != feature_dim:
                raise DimensionError("head", self.backbone[-1].weight.shape, head.weight.shape)
        if self.semantic.out_dim != self.style.out_dim:
            raise DimensionError("heads", self.semantic.weight.shape, self.style.weight.shape)

    @property
    def input_dim(self) -> int:
        return self.backbone[0].in_dim

    @property
    def feature_dim(self) -> int:
        return self.backbone[-1].out_dim

    @property
    def embed_dim(self) -> int:
        return self.semantic.out_dim


@dataclass
class EncoderParams(_EncoderStack):
    """Trainable weights: backbone, semantic head, style head and classifier.

    ``domain_head`` only exists for the domain-classifier variant, where it
    stands in for the style banks.
    """

    classifier: DenseLayer
    domain_head: Optional[DenseLayer] = None

    def __post_init__(self) -> None:
        self._check_chain()
        if self.classifier.in_dim != self.embed_dim:
            raise DimensionError("classifier", self.semantic.weight.shape, self.classifier.weight.shape)
        if self.domain_head is not None and self.domain_head.in_dim != self.embed_dim:
            raise DimensionError("domain_head", self.style.weight.shape, self.domain_head.weight.shape)

    @property
    def n_classes(self) -> int:
        return self.classifier.out_dim

    def named_arrays(self) -> dict[str, np.ndarray]:
        """Every trainable array by name; the arrays themselves, not copies."""
        named = self._encoder_arrays()
        named.update(self.classifier.arrays("classifier"))
        if self.domain_head is not None:
            named.update(self.domain_head.arrays("domain_head"))
        return named

    def encoder_arrays(self) -> dict[str, np.ndarray]:
        """The arrays mirrored by the memory encoder."""
        return self._encoder_arrays()

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.named_arrays().values())

    def copy(self) -> "EncoderParams":
        return copy.deepcopy(self)


@dataclass
class MemoryParams(_EncoderStack):
    """Momentum mirror of the encoder (no classifier). Never trained directly."""

    def __post_init__(self) -> None:
        self._check_chain()

    @classmethod
    def mirror(cls, params: EncoderParams) -> "MemoryParams":
        return cls(
            backbone=[copy.deepcopy(layer) for layer in params.backbone],
            semantic=copy.deepcopy(params.semantic),
            style=copy.deepcopy(params.style),
        )

    def named_arrays(self) -> dict[str, np.ndarray]:
        return self._encoder_arrays()

    def __iter__(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self.named_arrays().items())


def _he_layer(rng: np.random.Generator, in_dim: int, out_dim: int, gain: float = 2.0) -> DenseLayer:
    weight = rng.normal(0.0, np.sqrt(gain / in_dim), size=(in_dim, out_dim))
    return DenseLayer(weight, np.zeros(out_dim))


def init_params(
    input_dim: int,
    hidden_dims: Sequence[int],
    feature_dim: int,
    embed_dim: int,
    n_classes: int,
    rng: np.random.Generator,
    *,
    zero_classifier: bool = False,
) -> EncoderParams:
    """He-normal backbone, unit-gain heads, zero biases."""
    widths = [input_dim, *hidden_dims, feature_dim]
    backbone = [_he_layer(rng, a, b) for a, b in zip(widths[:-1], widths[1:])]
    semantic = _he_layer(rng, feature_dim, embed_dim, gain=1.0)
    style = _he_layer(rng, feature_dim, embed_dim, gain=1.0)
    if zero_classifier:
        classifier = DenseLayer.zeros(embed_dim, n_classes)
    else:
        classifier = _he_layer(rng, embed_dim, n_classes, gain=1.0)
    return EncoderParams(backbone=backbone, semantic=semantic, style=style, classifier=classifier)


def init_domain_head(embed_dim: int, n_domains: int, rng: np.random.Generator) -> DenseLayer:
    return _he_layer(rng, embed_dim, n_domains, gain=1.0)


def init_from_config(config: TrainConfig, rng: np.random.Generator) -> EncoderParams:
    return init_params(
        config.input_dim,
        config.hidden_dims,
        config.feature_dim,
        config.embed_dim,
        config.n_classes,
        rng,
        zero_classifier=config.zero_init_classifier,
    )
