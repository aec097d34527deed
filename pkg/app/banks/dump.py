"""Plain-text bank dumps for debugging.

Format: one section per bank, a header line ``# bank <name> rows=<n> dim=<k>``
followed by ``n`` lines of ``k`` space-separated floats (``repr`` precision).
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

import numpy as np

from app.types import ConfigurationError

from .banks import SemanticBank, StyleBankSet

_HEADER = re.compile(r"^# bank (\S+) rows=(\d+) dim=(\d+)$")


def _section(name: str, rows: np.ndarray, dim: int) -> list[str]:
    lines = [f"# bank {name} rows={len(rows)} dim={dim}"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in rows)
    return lines


def dump_banks(path: Path, style: Optional[StyleBankSet] = None, semantic: Optional[SemanticBank] = None) -> Path:
    lines: list[str] = []
    if style is not None:
        for d in style.domains:
            lines += _section(f"style-{d}", style.snapshot(d), style.dim)
    if semantic is not None:
        lines += _section("semantic", semantic.snapshot(), semantic.dim)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_bank_dump(path: Path) -> dict[str, np.ndarray]:
    sections: dict[str, np.ndarray] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    i = 0
    while i < len(lines):
        match = _HEADER.match(lines[i])
        if match is None:
            raise ConfigurationError(f"expected a bank header, got {lines[i]!r}", line=i + 1)
        name, n, dim = match.group(1), int(match.group(2)), int(match.group(3))
        body = lines[i + 1 : i + 1 + n]
        if len(body) != n:
            raise ConfigurationError(f"bank {name} is truncated", line=i + 1)
        rows = np.array([[float(v) for v in row.split()] for row in body]) if n else np.empty((0, dim))
        sections[name] = rows.reshape(n, dim)
        i += n + 1
    return sections
