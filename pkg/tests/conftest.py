from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SAMPLES = Path(__file__).resolve().parents[1] / "src" / "triadkit" / "samples"

_criteria: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(label, title): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label, title = marker.args
    entry = _criteria.setdefault(label, {"title": title, "ok": True, "seen": False})
    if report.when == "call" or report.failed:
        entry["seen"] = True
        entry["ok"] = entry["ok"] and report.passed
    if report.skipped:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s[2:])):
        entry = _criteria[label]
        status = "PASS" if entry["ok"] and entry["seen"] else "FAIL"
        terminalreporter.write_line(f"{label} {status} {entry['title']}")


@pytest.fixture
def samples() -> Path:
    return SAMPLES


@pytest.fixture
def hr_schema():
    from triadkit.dsl import load

    return load(SAMPLES / "hr.tdk")
