import json
from pathlib import Path

import pytest

from casenet import parse_case_model
from casenet.engine import Engine

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_text(name: str) -> str:
    return (FIXTURES / f"{name}.json").read_text()


def load_doc(name: str) -> dict:
    return json.loads(load_text(name))


@pytest.fixture(scope="session")
def mini_model():
    return parse_case_model(load_text("conference-mini"))


@pytest.fixture(scope="session")
def micro_model():
    return parse_case_model(load_text("conference-micro"))


@pytest.fixture(scope="session")
def minimal_model():
    return parse_case_model(load_text("minimal"))


@pytest.fixture(scope="session")
def mini_engine(mini_model):
    return Engine(mini_model)


@pytest.fixture(scope="session")
def micro_engine(micro_model):
    return Engine(micro_model)
