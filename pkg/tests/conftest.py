import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"
sys.path.insert(0, str(FIXTURES))

T0 = datetime(2020, 1, 1, tzinfo=timezone.utc)


def at(seconds: float = 0, days: float = 0) -> datetime:
    return T0 + timedelta(seconds=seconds, days=days)


@pytest.fixture
def hospital_ini():
    return FIXTURES / "hospital.ini"


@pytest.fixture
def hospital_csv():
    return FIXTURES / "hospital.csv"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
