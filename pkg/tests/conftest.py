import random

import pytest

from qweyl.lattice import load_group


@pytest.fixture(scope="session")
def e8():
    return load_group("e8")


@pytest.fixture(scope="session")
def e7():
    return load_group("e7")


@pytest.fixture(scope="session")
def e6():
    return load_group("e6")


@pytest.fixture(scope="session")
def d5():
    return load_group("d5")


@pytest.fixture(params=["e8", "e7", "e6", "d5"])
def group(request):
    return load_group(request.param)


@pytest.fixture
def rng():
    return random.Random(0)
