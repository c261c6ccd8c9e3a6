import pytest

from osctime import Nonlinearity


@pytest.fixture(scope="session")
def linear():
    return Nonlinearity.linear()


@pytest.fixture(scope="session")
def sine():
    return Nonlinearity.sine()


@pytest.fixture(scope="session")
def duffing():
    return Nonlinearity.duffing(1.0)


@pytest.fixture(scope="session")
def hard_duffing():
    return Nonlinearity.duffing(-1.0)


ALL_MODELS = [
    Nonlinearity.linear(),
    Nonlinearity.sine(),
    Nonlinearity.duffing(1.0),
    Nonlinearity.duffing(-1.0),
    Nonlinearity.even_poly([-0.5, 0.1]),
]
