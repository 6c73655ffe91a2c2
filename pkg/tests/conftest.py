import os
import sys

import pytest

sys.setrecursionlimit(100000)

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "synthcell", "corpus")
FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def corpus_path(name: str) -> str:
    return os.path.normpath(os.path.join(CORPUS, name))


def fixture_path(name: str) -> str:
    return os.path.normpath(os.path.join(FIXTURES, name))


@pytest.fixture
def module1_session():
    from synthcell.database import Session
    from synthcell.notation import parse_axiom_file

    axf = parse_axiom_file(corpus_path("module1.ax"))
    s = Session(axf.sig)
    s.load_axiom_file(axf)
    return s


@pytest.fixture
def simple_session():
    from synthcell.database import Session
    from synthcell.notation import parse_axiom_file

    axf = parse_axiom_file(corpus_path("simple_circuit.ax"))
    s = Session(axf.sig)
    s.load_axiom_file(axf)
    return s
