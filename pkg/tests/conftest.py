import json
from pathlib import Path

import pytest

from codeorigin.extractor import ClassRename, read_rename_map
from codeorigin.snippet import Snippet

FIXTURES = Path(__file__).parent / "fixtures"
JAVA_DIR = FIXTURES / "java"
GOLDEN_DIR = FIXTURES / "golden"


def load_java_fixtures():
    index = json.loads((JAVA_DIR / "index.json").read_text(encoding="utf-8"))
    out = []
    for name, meta in index.items():
        text = (JAVA_DIR / f"{name}.java").read_bytes().decode("utf-8")
        out.append(Snippet(name, meta["origin"], text, meta["pairing_key"]))
    return out


@pytest.fixture(scope="session")
def java_fixtures():
    return load_java_fixtures()


@pytest.fixture(scope="session")
def rename_maps():
    return {
        ClassRename.COUNTERPART_NAME: read_rename_map(FIXTURES / "rename_counterpart.tsv", ClassRename.COUNTERPART_NAME),
        ClassRename.HUMAN_CHOSEN_NAME: read_rename_map(FIXTURES / "rename_human.tsv"),
    }


# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
