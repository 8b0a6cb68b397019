import numpy as np
import pytest

_AC_LINES = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ac_report():
    """Record one summary line per acceptance criterion."""
    def record(key: str, passed: bool, detail: str):
        line = f"{key}: {'PASS' if passed else 'FAIL'} | {detail}"
        _AC_LINES[key] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _AC_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_AC_LINES, key=lambda k: int(k.split("-")[1])):
        terminalreporter.write_line(_AC_LINES[key])
