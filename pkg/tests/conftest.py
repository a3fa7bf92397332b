"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

_ACCEPTANCE: dict = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE[number] = (title, passed, detail)


@pytest.fixture
def criterion(request):
    """Context helper: ``with criterion(3, "A2 table"):`` records pass/fail for the summary."""

    class _Ctx:
        def __init__(self, number, title):
            self.number, self.title = number, title

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            detail = "" if exc is None else f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
            record_acceptance(self.number, self.title, exc is None, detail)
            line = f"[criterion {self.number:2d}] {'PASS' if exc is None else 'FAIL'}  {self.title}"
            print(("\n" + line + (f"  ({detail})" if detail else "")))
            return False

    return _Ctx


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail[:160]})"
        terminalreporter.write_line(line)
