from __future__ import annotations


class SteamError(Exception):
    """Base class for every error raised by the package.

    Subclasses also inherit the closest builtin exception so callers that only
    know about ``ValueError`` or ``KeyError`` keep working.
    """


class DimensionError(SteamError, ValueError):
    """Operand shapes do not agree."""

    def __init__(self, op: str, *shapes: tuple[int, ...]) -> None:
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")
        self.op = op
        self.shapes = shapes


class DegenerateVectorError(SteamError, ValueError):
    """A vector had (near) zero norm where a direction was required."""


class DomainOfDefinitionError(SteamError, ValueError):
    """Input outside the mathematical domain of an operation (e.g. log of 0)."""


class ConfigurationError(SteamError, ValueError):
    """Invalid hyperparameter or config file.

    ``key`` names the offending setting and ``line`` the 1-based line number
    of a config file when known.
    """

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None) -> None:
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)
        self.key = key
        self.line = line


class BankColdError(SteamError, RuntimeError):
    """A memory bank was read before warm-up filled it."""


class UnknownDomainError(SteamError, KeyError):
    """Domain id outside the configured bank set."""


class NonUnitVectorError(SteamError, ValueError):
    """Bank entries must have unit L2 norm."""


class LabelRangeError(SteamError, ValueError):
    """Class label outside ``[0, n_classes)``."""


class ContractError(SteamError, RuntimeError):
    """Caller broke an API contract."""
