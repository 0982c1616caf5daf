import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Criterion number -> (passed, seconds, detail), filled by test_acceptance."""
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(log):
        passed, seconds, detail = log[num]
        terminalreporter.write_line(
            f"criterion {num}: {'PASS' if passed else 'FAIL'} ({seconds:.1f} s) {detail}")
