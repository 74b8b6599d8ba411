"""Shared fixtures: the acceptance recorder and its terminal summary."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one verdict line for an acceptance criterion, then assert it.

    The line is appended before the assertion fires so a failing criterion
    still shows up as FAIL in the end-of-run summary.
    """

    def record(number: int, title: str, ok: bool, details: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(
            f"criterion {number:2d} ({title}): {verdict} ({details})"
        )
        assert ok, f"criterion {number} ({title}) failed: {details}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
