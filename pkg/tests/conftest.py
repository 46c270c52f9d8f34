from pathlib import Path

import pytest

from tlakit.corpus import Glossary, MorphToken, TermEntry

DATA = Path(__file__).parent / "data"

EXAMPLE_SRC = ["faulty", "engine", "or", "in", "transmission"]
EXAMPLE_TGT_MORPH = [
    MorphToken("atteice", "atteice", "NOUN"),
    MorphToken("dzinējā", "dzinējs", "NOUN"),
    MorphToken("vai", "vai", "CCONJ"),
    MorphToken("transmisijas", "transmisija", "NOUN"),
]
EXAMPLE_TLA = "faulty|w engine|s dzinējs|t or|w in|w transmission|s transmisija|t"
EXAMPLE_ETA = "faulty|w engine|s dzinējā|t or|w in|w transmission|s transmisijas|t"


@pytest.fixture
def example_glossary():
    return Glossary((TermEntry(("engine",), ("dzinējs",)), TermEntry(("transmission",), ("transmisija",))))


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
