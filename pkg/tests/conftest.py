import pytest

from ringsieve import QQ, make_algebra
from ringsieve.sieve import kfree_sieve


@pytest.fixture(scope="session")
def k2():
    return make_algebra([2])


@pytest.fixture(scope="session")
def k3():
    return make_algebra([3])


@pytest.fixture(scope="session")
def k5():
    return make_algebra([5])


@pytest.fixture(scope="session")
def k13():
    return make_algebra([13])


@pytest.fixture(scope="session")
def ki():
    return make_algebra([-1])


@pytest.fixture(scope="session")
def squarefree_q():
    return kfree_sieve(QQ, 2)
