import time

import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}
_START = time.perf_counter()
RUNTIME_BUDGET = 120.0


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records a pass/fail line for acceptance criterion ``n``."""

    def record(n: int, ok: bool, detail: str) -> None:
        prev_ok, prev = _RESULTS.get(n, (True, ""))
        _RESULTS[n] = (prev_ok and ok, f"{prev}; {detail}" if prev else detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    elapsed = time.perf_counter() - _START
    if 10 in _RESULTS:
        ok, detail = _RESULTS[10]
        fast = elapsed < RUNTIME_BUDGET
        _RESULTS[10] = (ok and fast, f"{detail}; session runtime {elapsed:.1f} s "
                                     f"(budget {RUNTIME_BUDGET:.0f} s)")
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, detail = _RESULTS[n]
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
