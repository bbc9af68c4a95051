"""Shared test plumbing: collects acceptance-criterion result lines."""

_lines = []


def record_acceptance(line: str) -> None:
    """Store one pass/fail line for the terminal summary."""
    _lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if not _lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _lines:
        terminalreporter.write_line(line)
