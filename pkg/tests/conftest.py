import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[bool, str]] = {}
_EXPECTED = range(1, 13)


def _record(number: int, passed: bool, detail: str) -> None:
    _RESULTS[number] = (bool(passed), detail)


@pytest.fixture
def criterion():
    """Registers one acceptance-criterion outcome for the summary block."""
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in _EXPECTED:
        if number in _RESULTS:
            passed, detail = _RESULTS[number]
            verdict = "PASS" if passed else "FAIL"
        else:
            verdict, detail = "FAIL", "never evaluated"
        terminalreporter.write_line(f"[criterion {number:2d}] {verdict} - {detail}")
