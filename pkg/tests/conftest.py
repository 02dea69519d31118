import numpy as np
import pytest

from stretchchaos.models import unit_square


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: integrates switched flows end to end")


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
