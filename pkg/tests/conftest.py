import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; the verdict is printed at the end of the run."""

    def record(key, description, passed, detail=""):
        _CRITERIA[key] = (description, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        description, passed, detail = _CRITERIA[key]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict}  {key}  {description}  {detail}")
