import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS = defaultdict(list)
_TABLES = {}


def _line(criterion):
    parts = _VERDICTS[criterion]
    status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
    detail = "; ".join(d for _, d in parts if d)
    return f"criterion {criterion:>2}: {status}  {detail}".rstrip()


class Verdicts:
    """One PASS/FAIL line per acceptance criterion; a criterion checked by
    several tests passes only if every part does."""

    def record(self, criterion, ok, detail=""):
        _VERDICTS[criterion].append((bool(ok), detail))
        print(_line(criterion))
        return ok

    def table(self, title, header, rows):
        """Evidence table, echoed in the terminal summary as CSV."""
        _TABLES[title] = [header, *rows]
        for row in _TABLES[title]:
            print(",".join(map(str, row)))


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_VERDICTS):
        terminalreporter.write_line(_line(criterion))
    for title, rows in _TABLES.items():
        terminalreporter.section(title)
        for row in rows:
            terminalreporter.write_line(",".join(map(str, row)))
