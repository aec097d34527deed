"""Core types for the memory-bank domain generalization package.

This package centralizes enums, errors, the experiment config, result models
and protocols in one place. Most modules should import types from here
rather than directly from submodules.

Usage:
    from app.types import TrainConfig, MethodVariant, RunResult
"""

from .config import TrainConfig, full_scale_defaults
from .config_file import echo_config, echo_lines, load_config, parse_config_text
from .enums import (
    ABLATION_VARIANTS,
    DESIGN_VARIANTS,
    EXTENDED_ABLATION_VARIANTS,
    LossComponent,
    MethodVariant,
    ProtocolMode,
    SubCommand,
)
from .errors import (
    BankColdError,
    ConfigurationError,
    ContractError,
    DegenerateVectorError,
    DimensionError,
    DomainOfDefinitionError,
    LabelRangeError,
    NonUnitVectorError,
    SteamError,
    UnknownDomainError,
)
from .protocols import FeatureBank
from .results import EpochRecord, EvalResult, LossValues, RunResult, StyleDiagnostic

__all__ = [
    "TrainConfig",
    "full_scale_defaults",
    "load_config",
    "parse_config_text",
    "echo_config",
    "echo_lines",
    "MethodVariant",
    "ProtocolMode",
    "LossComponent",
    "SubCommand",
    "ABLATION_VARIANTS",
    "EXTENDED_ABLATION_VARIANTS",
    "DESIGN_VARIANTS",
    "SteamError",
    "DimensionError",
    "DegenerateVectorError",
    "DomainOfDefinitionError",
    "ConfigurationError",
    "BankColdError",
    "UnknownDomainError",
    "NonUnitVectorError",
    "LabelRangeError",
    "ContractError",
    "FeatureBank",
    "LossValues",
    "EpochRecord",
    "EvalResult",
    "StyleDiagnostic",
    "RunResult",
]
