import random
from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parents[1] / "src" / "amisel" / "data"


def random_grid(rng: random.Random, n: int, m: int, gridded: bool = False) -> dict:
    """``{name: {dataset: (time_ms, accuracy)}}`` with ``n`` candidates and ``m`` datasets."""

    def value():
        if gridded:
            return (float(rng.choice([10, 20, 30, 40, 50])), float(rng.choice([50, 60, 70, 80])))
        return (rng.uniform(5.0, 60.0), rng.uniform(20.0, 90.0))

    return {f"m{i:02d}": {f"d{j}": value() for j in range(m)} for i in range(n)}


@pytest.fixture
def data_dir() -> Path:
    return DATA


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        title = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
        _ACCEPTANCE.append((title, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for title, outcome, duration in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {title}  ({duration:.2f} s)")
