from __future__ import annotations

import pytest

_acceptance_lines: list = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(k: int, name: str, passed: bool, detail: str) -> None:
        line = f"criterion {k:2d} [{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        print(line)
        _acceptance_lines.append((k, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
