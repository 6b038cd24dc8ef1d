import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion and fail the test if any check fails.

    ``checks`` maps a short label to ``(ok, detail)``.
    """
    def record(number: int, title: str, checks: dict) -> None:
        failed = [f"{label}: {detail}" for label, (ok, detail) in checks.items() if not ok]
        request.config.stash.setdefault(_RESULTS, {})[number] = (title, not failed, failed)
        assert not failed, "; ".join(failed)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, failed = results[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += "  [" + "; ".join(failed) + "]"
        terminalreporter.write_line(line)
