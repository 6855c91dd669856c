import sys
from importlib import resources
from pathlib import Path

import pytest

from ugparse.grammar import compile_grammar

TESTS = Path(__file__).parent
DATA = TESTS / "data"
sys.path.insert(0, str(TESTS))


def bundled(name: str) -> str:
    return resources.files("ugparse").joinpath(f"data/{name}").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def demo():
    return compile_grammar(bundled("demo.ugr"), "demo.ugr")


@pytest.fixture(scope="session")
def attachment():
    return compile_grammar(bundled("attachment.ugr"), "attachment.ugr")


@pytest.fixture(scope="session")
def corpus_path():
    return resources.files("ugparse").joinpath("data/demo_corpus.txt")


# one pass/fail line per acceptance criterion, printed after the run
_criteria: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
