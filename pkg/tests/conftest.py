"""Shared pytest wiring: the acceptance suite reports one line per criterion."""

from __future__ import annotations

import pytest

acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record a criterion outcome line for the terminal summary."""

    def record(line: str) -> None:
        acceptance_lines.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)
