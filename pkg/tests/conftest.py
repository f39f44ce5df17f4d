import pytest

_VERDICTS: dict = {}


@pytest.fixture
def verdict():
    """Record an acceptance verdict; the terminal summary lists them all."""

    def record(key: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {key}: {detail}"
        _VERDICTS[key] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_VERDICTS, key=lambda k: int(k.split()[-1])):
        terminalreporter.write_line(_VERDICTS[key])
