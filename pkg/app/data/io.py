"""Dataset export/import as CSV.

The first line is the version tag ``# steam-dataset v1``; the header names
``x0 .. x{k-1}, y, d``. Unlabeled rows leave ``y`` empty.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from app.types import ConfigurationError

from .synthetic import UNLABELED, Dataset

FORMAT_TAG = "# steam-dataset v1"


def export_dataset(dataset: Dataset, path: Path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(dataset.x, columns=[f"x{i}" for i in range(dataset.input_dim)])
    frame["y"] = pd.Series(dataset.y, dtype="Int64").mask(~dataset.labeled)
    frame["d"] = dataset.d
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(FORMAT_TAG + "\n")
        frame.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
    return path


def import_dataset(path: Path) -> Dataset:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        tag = fh.readline().rstrip("\n")
        if tag != FORMAT_TAG:
            raise ConfigurationError(f"unsupported dataset format {tag!r}", line=1)
        frame = pd.read_csv(fh, dtype={"y": "Int64", "d": "int64"})
    feature_cols = [c for c in frame.columns if c.startswith("x")]
    if not feature_cols or "y" not in frame or "d" not in frame:
        raise ConfigurationError("dataset header must name x0.., y, d", line=2)
    y = frame["y"].fillna(UNLABELED).to_numpy(dtype=np.int64)
    return Dataset(frame[feature_cols].to_numpy(dtype=np.float64), y, frame["d"].to_numpy())
