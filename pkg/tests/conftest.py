import os
from pathlib import Path

import pytest

from ngcut.model import Instance, Piece

# outcome per acceptance criterion, filled by the report hook below
_ACCEPTANCE: dict = {}


@pytest.fixture
def t1() -> Instance:
    return Instance(4, 4, (Piece(2, 4, 9, 2), Piece(4, 2, 8, 1)), "T1")


T1_TEXT = "name T1\nstock 4 4\npieces 2\n2 4 9 2\n4 2 8 1\n"


@pytest.fixture
def t1_file(tmp_path) -> Path:
    path = tmp_path / "t1.txt"
    path.write_text(T1_TEXT)
    return path


def ngcut_file():
    """OR-Library ngcut file under $NGCUT_DATA_DIR, or None."""
    base = os.environ.get("NGCUT_DATA_DIR")
    if not base:
        return None
    for name in ("ngcut.txt", "ngcut"):
        path = Path(base) / name
        if path.is_file():
            return path
    return None


def ngcut_columns():
    raw = os.environ.get("NGCUT_COLUMNS")
    return tuple(raw.split(",")) if raw else ("length", "width", "max_count", "value")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _ACCEPTANCE.setdefault(crit[0], (crit[1], []))[1].append(word)


def _verdict(words):
    """FAIL beats everything; PART means some tests passed and the rest skipped."""
    if "FAIL" in words:
        return "FAIL"
    if all(w == "SKIP" for w in words):
        return "SKIP"
    if "SKIP" in words:
        return "PART"
    return "PASS"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, words = _ACCEPTANCE[num]
        verdict = _verdict(words)
        note = f" ({words.count('SKIP')} of {len(words)} skipped)" if verdict == "PART" else ""
        terminalreporter.write_line(f"criterion {num:2d}: {verdict:4s}  {title}{note}")
