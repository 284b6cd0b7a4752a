import numpy as np
import pytest

from drspc.bch import build_code


@pytest.fixture(scope="session")
def c1():
    """(127, 112) t=2 even-weight component code."""
    return build_code(7, 2, True)


@pytest.fixture(scope="session")
def c2():
    """(255, 238) t=2 even-weight component code."""
    return build_code(8, 2, True)


@pytest.fixture(scope="session")
def plain127():
    """(127, 113) t=2 BCH code without the even-weight restriction."""
    return build_code(7, 2, False)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
