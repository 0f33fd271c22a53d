from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record(capsys):
    """Log one acceptance line, then assert it."""

    def _record(criterion: int, ok: bool, detail: str) -> None:
        _RESULTS[criterion] = (bool(ok), detail)
        with capsys.disabled():
            print(f"\n[acceptance {criterion:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        ok, detail = _RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
