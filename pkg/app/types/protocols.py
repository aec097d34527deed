from __future__ import annotations

from typing import Protocol

import numpy as np


class FeatureBank(Protocol):
    """Anything a loss can read bank entries from.

    Losses only ever see a snapshot: an immutable ``(rows, embed_dim)``
    float64 matrix of unit-norm rows. Implementations must raise
    ``BankColdError`` from ``snapshot`` when a read would be meaningless.

    Minimal example:
        >>> import numpy as np
        >>> class FixedBank:
        ...     def __init__(self, rows: np.ndarray) -> None:
        ...         self.rows = rows
        ...     def snapshot(self) -> np.ndarray:
        ...         view = self.rows.copy()
        ...         view.flags.writeable = False
        ...         return view
        ...     def __len__(self) -> int:
        ...         return len(self.rows)
    """

    def snapshot(self) -> np.ndarray:
        """Return a read-only copy of the current entries."""
        ...

    def __len__(self) -> int:
        ...
