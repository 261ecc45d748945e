from pathlib import Path

import pytest

import fgdict
from fgdict.parser import parse_program

CORPUS = Path(fgdict.__file__).parent / "corpus"

# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def load(name: str):
    return parse_program((CORPUS / name).read_text())


def corpus_files(sub: str = "") -> list[Path]:
    return sorted((CORPUS / sub).glob("*.fg"))


@pytest.fixture
def int_eq():
    return load("int_eq.fg")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
