from pathlib import Path

import pytest

import catslash
from catslash.congruence import CongruenceOracle
from catslash.theoria import parse_theory

FIXTURES = Path(catslash.__file__).parent / "fixtures"


def load(name, oracle=CongruenceOracle):
    return parse_theory((FIXTURES / name).read_text(), oracle)


@pytest.fixture(scope="session")
def fixtures():
    return FIXTURES


@pytest.fixture(scope="session")
def two_arrow():
    return load("two_arrow.theory")


@pytest.fixture(scope="session")
def demo():
    return load("demo/demo.theory")
