from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
BUGS = CORPUS / "bugs"


def bug_dirs() -> list[Path]:
    return sorted(p for p in BUGS.iterdir() if (p / "bug.json").exists())


@pytest.fixture
def bug_copy(tmp_path):
    """Copy a corpus bug into a scratch directory so report.json lands there."""

    def make(name: str) -> Path:
        dst = tmp_path / name
        shutil.copytree(BUGS / name, dst, ignore=shutil.ignore_patterns("report.json"))
        return dst

    return make


@pytest.fixture
def report_schema():
    return json.loads((ROOT / "docs" / "report.schema.json").read_text())


# One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
