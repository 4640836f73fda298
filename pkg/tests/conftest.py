import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request, capsys):
    """Print one pass/fail line for an acceptance criterion and keep it for the run summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def emit(number, ok, seconds, limit, detail):
        status = "PASS" if ok and seconds < limit else "FAIL"
        line = f"criterion {number}: {status}  {seconds:7.2f}s (limit {limit:g}s)  {detail}"
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return status == "PASS"

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
