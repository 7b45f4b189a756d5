import time
from contextlib import contextmanager

import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def criterion(request):
    """Context manager that times one acceptance criterion and records PASS/FAIL."""
    lines = request.config.stash[_LINES_KEY]

    @contextmanager
    def run(number: int, title: str, limit_s: float):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            dt = time.perf_counter() - t0
            status = "PASS" if ok and dt < limit_s else "FAIL"
            line = f"criterion {number:2d} {status}  {title}  ({dt:.2f}s, limit {limit_s:g}s)"
            print(line)
            lines.append((number, line))
        assert dt < limit_s, f"runtime {dt:.1f}s exceeds {limit_s}s"

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
