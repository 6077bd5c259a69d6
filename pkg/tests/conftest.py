import contextlib
import time

import pytest

ACCEPTANCE_RESULTS: list[tuple[str, bool, float, float]] = []


@contextlib.contextmanager
def _criterion(name: str, budget_s: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"{name}: took {elapsed:.2f}s, budget {budget_s}s"
        ok = True
    finally:
        ACCEPTANCE_RESULTS.append((name, ok, time.perf_counter() - start, budget_s))


@pytest.fixture
def criterion():
    """Run a block as a named acceptance criterion with a wall-clock budget."""
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, elapsed, budget in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {name}  ({elapsed:.3f}s, budget {budget:g}s)")
