from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cogaug.dsl import load_machine

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
MACHINES = ROOT / "machines"
DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture
def coin():
    return load_machine(MACHINES / "coin.gim")


@pytest.fixture
def uniform4():
    return load_machine(MACHINES / "uniform4.gim")


@pytest.fixture
def flip_bits():
    return load_machine(MACHINES / "flip_bits.gim")


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.failed:
        _acceptance.setdefault(report.nodeid, report.outcome)
        if report.failed:
            _acceptance[report.nodeid] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid, outcome in _acceptance.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
