import time
from contextlib import contextmanager

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE: list[str] = []


@contextmanager
def _timed(num: int, title: str, budget: float):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        dt = time.perf_counter() - t0
        ACCEPTANCE.append(f"FAIL criterion {num:2d} ({dt:.2f}s / {budget:g}s): {title}: {exc!r:.200}")
        raise
    dt = time.perf_counter() - t0
    ok = dt < budget
    ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'} criterion {num:2d} ({dt:.2f}s / {budget:g}s): {title}")
    assert ok, f"criterion {num} took {dt:.2f}s, budget {budget}s"


@pytest.fixture
def criterion():
    return _timed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
