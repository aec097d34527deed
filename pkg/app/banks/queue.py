from __future__ import annotations

import logging
from collections import deque
from typing import Iterable

import numpy as np

from app.types import ConfigurationError, DimensionError, NonUnitVectorError

logger = logging.getLogger("steam.banks")

UNIT_TOLERANCE = 1e-6


class FeatureQueue:
    """Fixed-capacity FIFO of unit-norm vectors.

    Pushing into a full queue evicts the oldest entry. Entries are stored as
    private copies, so nothing pushed here is linked to any graph.

    Example:
        >>> import numpy as np
        >>> q = FeatureQueue(capacity=2, dim=2)
        >>> for v in np.eye(2):
        ...     q.push(v)
        >>> q.push(np.array([0.6, 0.8]))
        >>> q.snapshot().tolist()
        [[0.0, 1.0], [0.6, 0.8]]
    """

    def __init__(self, capacity: int, dim: int, name: str = "queue") -> None:
        if capacity <= 0:
            raise ConfigurationError(f"capacity must be positive, got {capacity}", key="bank_size")
        if dim <= 0:
            raise ConfigurationError(f"dim must be positive, got {dim}", key="embed_dim")
        self.name = name
        self.dim = dim
        self._entries: deque[np.ndarray] = deque(maxlen=capacity)

    @property
    def capacity(self) -> int:
        return self._entries.maxlen or 0

    @property
    def is_full(self) -> bool:
        return len(self._entries) == self.capacity

    def __len__(self) -> int:
        return len(self._entries)

    def check(self, vector: np.ndarray) -> np.ndarray:
        """Validated read-only copy of ``vector``; the queue is not touched."""
        v = np.array(vector, dtype=np.float64).reshape(-1)
        if v.shape != (self.dim,):
            raise DimensionError(f"push[{self.name}]", v.shape, (self.dim,))
        norm = float(np.sqrt(v @ v))
        if not np.isfinite(norm) or abs(norm - 1.0) > UNIT_TOLERANCE:
            raise NonUnitVectorError(f"{self.name}: entry norm {norm:.9f} is not 1")
        v.flags.writeable = False
        return v

    def push(self, vector: np.ndarray) -> None:
        self._entries.append(self.check(vector))

    def push_many(self, rows: Iterable[np.ndarray]) -> None:
        """All-or-nothing: a bad row leaves the queue as it was."""
        checked = [self.check(row) for row in rows]
        self._entries.extend(checked)

    def snapshot(self) -> np.ndarray:
        """Read-only ``(len, dim)`` copy, oldest entry first."""
        if self._entries:
            rows = np.stack(self._entries)
        else:
            rows = np.empty((0, self.dim))
        rows.flags.writeable = False
        return rows

    def __repr__(self) -> str:
        return f"FeatureQueue({self.name!r}, {len(self)}/{self.capacity}, dim={self.dim})"
