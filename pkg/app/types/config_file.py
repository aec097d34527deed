"""Flat ``key=value`` experiment config files.

One pair per line; blank lines and ``#`` comments are ignored and whitespace
around keys and values is trimmed. Unset keys take their ``TrainConfig``
default, so an empty file is the default config.
"""

from __future__ import annotations

import re
from enum import Enum
from pathlib import Path
from typing import Iterable

from pydantic import ValidationError

from .config import TrainConfig
from .errors import ConfigurationError

HEADER = "# steam experiment config"

_VALIDATOR_KEY = re.compile(r"\b([a-z_]+)=")


def _config_error(error: ValidationError, lines: dict[str, int]) -> ConfigurationError:
    first = error.errors()[0]
    loc = first.get("loc") or ()
    message = str(first.get("msg", "invalid value"))
    key = str(loc[0]) if loc else None
    if key is None:
        # model-level messages start with the offending "key=value"
        match = _VALIDATOR_KEY.search(message)
        key = match.group(1) if match else None
    return ConfigurationError(message, key=key, line=lines.get(key or ""))


def parse_config_text(text: str) -> TrainConfig:
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"expected key=value, got {raw.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigurationError("missing key before '='", line=number)
        if key not in TrainConfig.model_fields:
            raise ConfigurationError("unknown key", key=key, line=number)
        if key in values:
            raise ConfigurationError(f"duplicate key (first set on line {lines[key]})", key=key, line=number)
        values[key] = value
        lines[key] = number
    try:
        return TrainConfig(**values)  # type: ignore[arg-type]
    except ValidationError as e:
        raise _config_error(e, lines) from None


def load_config(path: Path | None) -> TrainConfig:
    """Config from ``path``; defaults when ``path`` is None."""
    if path is None:
        return TrainConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e.strerror}") from None
    return parse_config_text(text)


def _render(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def echo_lines(config: TrainConfig) -> Iterable[str]:
    """Canonical form: every key in declaration order."""
    yield HEADER
    for key in TrainConfig.model_fields:
        yield f"{key}={_render(getattr(config, key))}"


def echo_config(config: TrainConfig, path: Path) -> Path:
    """Write the canonical form; ``load_config`` of the result equals ``config``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(echo_lines(config)) + "\n", encoding="utf-8")
    return path
