"""The ``verify`` report: run every registered check and render the table."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional

import orjson
from pydantic import BaseModel

from app.verification import run_checks

from .config import get_settings
from .logging_config import logger


class CheckRow(BaseModel):
    name: str
    tolerance: float
    observed: float
    passed: bool


class VerifyReport(BaseModel):
    version: str
    checks: list[CheckRow]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def verify_suite(names: Optional[Iterable[str]] = None) -> VerifyReport:
    """Run the check catalogue (or the named subset) and collect the results."""
    rows = [
        CheckRow(name=r.name, tolerance=r.tolerance, observed=r.observed, passed=r.passed)
        for r in run_checks(names)
    ]
    return VerifyReport(version=get_settings().app_version, checks=rows)


def render_report(report: VerifyReport) -> list[str]:
    width = max((len(c.name) for c in report.checks), default=5)
    lines = [f"{'check':<{width}}  {'tolerance':>10}  {'observed':>12}  result"]
    for c in report.checks:
        verdict = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.name:<{width}}  {c.tolerance:>10.3g}  {c.observed:>12.4g}  {verdict}")
    passed = sum(c.passed for c in report.checks)
    lines.append(f"{passed}/{len(report.checks)} checks passed")
    return lines


def write_report(report: VerifyReport, path: Path) -> Path:
    """JSON report; non-finite observations are written as null."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(report.model_dump(), option=orjson.OPT_INDENT_2))
    return path


def log_report(report: VerifyReport) -> None:
    for line in render_report(report):
        logger.info(line)
    if not report.passed:
        logger.error("verification failed", extra={"failures": report.failures})
