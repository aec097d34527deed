import math
from pathlib import Path

import orjson
import pytest

from app.verification import Check, CheckRegistry
from server.cli import main
from server.verify import CheckRow, VerifyReport, render_report, verify_suite, write_report

FAST_CHECKS = [
    "gradcheck_matmul",
    "gradcheck_orthogonality_loss",
    "oracle_classification_loss",
    "closed_form_style_equal_similarity",
    "closed_form_jury_uniform_bank",
    "closed_form_classification_zero_logits",
    "closed_form_orthogonality_disjoint_rows",
    "closed_form_softmax_uniform_row",
    "cosine_schedule_endpoints",
    "momentum_update_exact",
    "loss_gradient_additivity",
]


def test_catalogue_is_large_and_grouped() -> None:
    names = CheckRegistry.names()
    assert len(names) >= 25
    assert len(set(names)) == len(names)
    for prefix in ("gradcheck_", "oracle_", "closed_form_"):
        assert any(n.startswith(prefix) for n in names)
    with pytest.raises(KeyError):
        CheckRegistry.get("no_such_check")


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_fast_checks_pass(name: str) -> None:
    result = CheckRegistry.get(name).run()
    assert result.passed, result


def test_raising_check_fails_with_infinite_observation() -> None:
    def broken() -> float:
        raise RuntimeError("boom")

    result = Check(name="broken", tolerance=1.0, fn=broken).run()
    assert not result.passed
    assert math.isinf(result.observed)
    assert not Check(name="nan", tolerance=1.0, fn=lambda: math.nan).run().passed


def test_report_rendering_and_json(tmp_path: Path) -> None:
    report = verify_suite(FAST_CHECKS[:3])
    assert report.passed and report.exit_code == 0
    assert report.version == "0.1.0-test"
    lines = render_report(report)
    assert lines[-1] == "3/3 checks passed"
    assert all(line.rstrip().endswith("PASS") for line in lines[1:-1])

    failing = VerifyReport(
        version="x",
        checks=[*report.checks, CheckRow(name="broken", tolerance=0.0, observed=math.inf, passed=False)],
    )
    assert failing.failures == ["broken"]
    assert failing.exit_code == 1
    payload = orjson.loads(write_report(failing, tmp_path / "verify.json").read_bytes())
    assert payload["checks"][-1]["observed"] is None
    assert [c["name"] for c in payload["checks"]][:3] == FAST_CHECKS[:3]


@pytest.mark.slow
def test_full_suite_passes(tmp_path: Path) -> None:
    assert main(["verify", "--output-dir", str(tmp_path)]) == 0
    payload = orjson.loads((tmp_path / "verify.json").read_bytes())
    assert len(payload["checks"]) == len(CheckRegistry.names())
    assert all(c["passed"] for c in payload["checks"])
