import time

import pytest

RESULTS = []
_START = time.perf_counter()
RUNTIME_LIMIT = 300.0


def record(number, name, ok, detail=""):
    """Store a one-line acceptance verdict for the terminal summary."""
    line = f"criterion {number:>2} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    RESULTS.append((number, line))
    print(line)
    return ok


@pytest.fixture
def report():
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not RESULTS:
        return
    elapsed = time.perf_counter() - _START
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(line)
    ok = elapsed < RUNTIME_LIMIT
    terminalreporter.write_line(
        f"criterion 11 suite runtime: {'PASS' if ok else 'FAIL'}  [{elapsed:.1f} s, limit {RUNTIME_LIMIT:.0f} s]")
