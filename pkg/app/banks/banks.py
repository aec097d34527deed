"""Per-domain style banks and the shared semantic (jury) bank."""

from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence

import numpy as np

from app.types import BankColdError, ConfigurationError, DimensionError, UnknownDomainError

from .queue import FeatureQueue

logger = logging.getLogger("steam.banks")


class StyleBankSet:
    """One ``FeatureQueue`` per domain, all with the same capacity and dim.

    Domains are kept in ascending id order; every multi-domain read returns
    rows in that order, then queue order within a domain.
    """

    def __init__(self, domains: Iterable[int], capacity: int, dim: int) -> None:
        ids = sorted({int(d) for d in domains})
        if not ids:
            raise ConfigurationError("style banks need at least one domain", key="n_domains")
        self._queues: dict[int, FeatureQueue] = {
            d: FeatureQueue(capacity, dim, name=f"style[{d}]") for d in ids
        }
        self.capacity = capacity
        self.dim = dim

    @property
    def domains(self) -> tuple[int, ...]:
        return tuple(self._queues)

    def queue(self, domain: int) -> FeatureQueue:
        try:
            return self._queues[int(domain)]
        except KeyError:
            raise UnknownDomainError(f"domain {domain} has no style bank (known: {self.domains})") from None

    def __len__(self) -> int:
        return sum(len(q) for q in self._queues.values())

    @property
    def is_warm(self) -> bool:
        return all(len(q) > 0 for q in self._queues.values())

    @property
    def is_full(self) -> bool:
        return all(q.is_full for q in self._queues.values())

    def push_style(self, domain: int, vector: np.ndarray) -> "StyleBankSet":
        """Append one memory style feature to its domain's queue."""
        self.queue(domain).push(vector)
        return self

    def push_rows(self, domains: Sequence[int], rows: np.ndarray) -> "StyleBankSet":
        """Append row ``k`` to the queue of ``domains[k]``; nothing is appended if any row is bad."""
        rows = list(rows)
        if len(rows) != len(domains):
            raise DimensionError("style push_rows", (len(domains),), (len(rows),))
        queues = [self.queue(int(d)) for d in domains]
        checked = [(q, q.check(row)) for q, row in zip(queues, rows)]
        for queue, row in checked:
            queue.push(row)
        return self

    def snapshot(self, domain: Optional[int] = None) -> np.ndarray:
        """Entries of one domain, or of all domains stacked in ascending id order."""
        if domain is not None:
            return self.queue(domain).snapshot()
        return self.stacked()[0]

    def require_warm(self) -> None:
        cold = [d for d, q in self._queues.items() if len(q) == 0]
        if cold:
            raise BankColdError(f"style banks {cold} are empty; warm up before reading")

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """All entries plus the owning domain id of each row."""
        snaps = [q.snapshot() for q in self._queues.values()]
        owners = np.concatenate(
            [np.full(len(s), d, dtype=np.int64) for d, s in zip(self._queues, snaps)]
        )
        rows = np.concatenate(snaps, axis=0) if snaps else np.empty((0, self.dim))
        rows.flags.writeable = False
        return rows, owners

    def negatives_for(self, domain: int) -> np.ndarray:
        """Every entry of every other domain."""
        self.queue(domain)
        self.require_warm()
        parts = [q.snapshot() for d, q in self._queues.items() if d != int(domain)]
        rows = np.concatenate(parts, axis=0) if parts else np.empty((0, self.dim))
        rows.flags.writeable = False
        return rows

    def __repr__(self) -> str:
        fill = ", ".join(f"{d}:{len(q)}" for d, q in self._queues.items())
        return f"StyleBankSet({fill}; capacity={self.capacity}, dim={self.dim})"


class SemanticBank:
    """The single jury bank of memory semantic features of variants."""

    def __init__(self, capacity: int, dim: int) -> None:
        self._queue = FeatureQueue(capacity, dim, name="semantic")

    @property
    def capacity(self) -> int:
        return self._queue.capacity

    @property
    def dim(self) -> int:
        return self._queue.dim

    def __len__(self) -> int:
        return len(self._queue)

    @property
    def is_warm(self) -> bool:
        return len(self._queue) > 0

    @property
    def is_full(self) -> bool:
        return self._queue.is_full

    def push_semantic(self, vector: np.ndarray) -> "SemanticBank":
        self._queue.push(vector)
        return self

    def push_rows(self, rows: np.ndarray) -> "SemanticBank":
        self._queue.push_many(rows)
        return self

    def snapshot(self) -> np.ndarray:
        return self._queue.snapshot()

    def __repr__(self) -> str:
        return f"SemanticBank({len(self)}/{self.capacity}, dim={self.dim})"
