"""Oracles, micro instances and the check catalogue behind ``verify``.

Usage:
    from app.verification import run_checks
"""

from . import oracles
from .checks import Check, CheckRegistry, CheckResult, run_checks
from .micro import MicroInstance, build_micro, micro_config, unit_rows

__all__ = [
    "oracles",
    "Check",
    "CheckRegistry",
    "CheckResult",
    "run_checks",
    "MicroInstance",
    "build_micro",
    "micro_config",
    "unit_rows",
]
