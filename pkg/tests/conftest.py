import random

import pytest

from g2kit import standard_structure


@pytest.fixture(scope="session")
def s():
    return standard_structure()


@pytest.fixture(scope="session")
def sf():
    return standard_structure("float")


@pytest.fixture
def rng():
    # fixed seed: failures must reproduce
    return random.Random(20260819)
