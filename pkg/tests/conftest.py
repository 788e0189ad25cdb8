import pytest

from exact_ising import build_dual, build_square_lattice


@pytest.fixture(scope="session")
def g2():
    return build_square_lattice(2)


@pytest.fixture(scope="session")
def g3():
    return build_square_lattice(3)


@pytest.fixture(scope="session")
def dual3():
    return build_dual(3)
