import numpy as np
import pytest

from sashadow import PointPattern, Window

# acceptance criterion id -> (passed, detail); printed in the terminal summary
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


def random_pattern(rng, n, window=Window()):
    return PointPattern.uniform(window, n, rng)
