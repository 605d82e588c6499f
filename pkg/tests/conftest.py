from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria suite")


def pytest_terminal_summary(terminalreporter):
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance.py" not in rep.nodeid or (rep.when != "call" and status != "error"):
                continue
            label = dict(getattr(rep, "user_properties", [])).get("criterion", rep.nodeid)
            rows.append((label, "PASS" if status == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for label, verdict in sorted(rows):
            terminalreporter.write_line(f"{verdict}  {label}")
