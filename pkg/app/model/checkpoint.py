"""Parameter checkpoints as ``.npz`` archives of named float64 arrays.

Names follow ``EncoderParams.named_arrays`` (``f0.weight``, ``semantic.bias``,
``classifier.weight``, optional ``domain_head.*``); memory-encoder arrays
carry a ``memory.`` prefix. Values round-trip bit-exactly.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np

from app.types import ConfigurationError

from .params import DenseLayer, EncoderParams, MemoryParams

logger = logging.getLogger("steam.model")

MEMORY_PREFIX = "memory."
_BACKBONE = re.compile(r"^f(\d+)\.weight$")


def save_checkpoint(path: Path, params: EncoderParams, memory: Optional[MemoryParams] = None) -> Path:
    path = Path(path)
    arrays = dict(params.named_arrays())
    if memory is not None:
        arrays.update({MEMORY_PREFIX + name: a for name, a in memory.named_arrays().items()})
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(fh, **arrays)
    logger.debug("checkpoint saved", extra={"path": str(path), "arrays": len(arrays)})
    return path


def _layer(arrays: dict[str, np.ndarray], prefix: str) -> DenseLayer:
    try:
        return DenseLayer(arrays[f"{prefix}.weight"], arrays[f"{prefix}.bias"])
    except KeyError as e:
        raise ConfigurationError(f"checkpoint is missing {e.args[0]}") from None


def _backbone(arrays: dict[str, np.ndarray]) -> list[DenseLayer]:
    depth = sum(1 for name in arrays if _BACKBONE.match(name))
    if depth == 0:
        raise ConfigurationError("checkpoint has no backbone layers")
    return [_layer(arrays, f"f{i}") for i in range(depth)]


def load_checkpoint(path: Path) -> tuple[EncoderParams, Optional[MemoryParams]]:
    with np.load(Path(path), allow_pickle=False) as archive:
        arrays = {name: archive[name] for name in archive.files}

    encoder = {k: v for k, v in arrays.items() if not k.startswith(MEMORY_PREFIX)}
    mirror = {k[len(MEMORY_PREFIX):]: v for k, v in arrays.items() if k.startswith(MEMORY_PREFIX)}

    params = EncoderParams(
        backbone=_backbone(encoder),
        semantic=_layer(encoder, "semantic"),
        style=_layer(encoder, "style"),
        classifier=_layer(encoder, "classifier"),
        domain_head=_layer(encoder, "domain_head") if "domain_head.weight" in encoder else None,
    )
    memory = None
    if mirror:
        memory = MemoryParams(
            backbone=_backbone(mirror),
            semantic=_layer(mirror, "semantic"),
            style=_layer(mirror, "style"),
        )
    return params, memory
