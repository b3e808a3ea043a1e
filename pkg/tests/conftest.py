"""Shared pytest config.

The acceptance tests register one line per criterion through the `criterion`
fixture; pytest_terminal_summary prints the collected PASS/FAIL table at the
end of the run so the gate is readable without scrolling through tracebacks.
"""

import pytest
from hypothesis import HealthCheck, settings

# single-core box: wall-clock deadlines only cause flakes
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_CRITERIA: list[tuple[str, bool, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criterion (slow)"
    )


@pytest.fixture
def criterion():
    """Record a named pass/fail check, then assert it."""

    def check(name: str, ok, detail: str = ""):
        _CRITERIA.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
