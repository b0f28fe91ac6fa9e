import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary."""
    def record(number, title):
        _ACCEPTANCE[number] = [title, "FAIL", ""]
        return _ACCEPTANCE[number]
    yield record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    number = getattr(item.function, "criterion_number", None)
    if number is not None and rep.when == "call" and number in _ACCEPTANCE:
        _ACCEPTANCE[number][1] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"criterion {number} [{status}] {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
