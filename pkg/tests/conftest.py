import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict: ``criterion(k, passed, detail)``."""

    def record(k, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail}"
        _CRITERIA.append((k, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)
