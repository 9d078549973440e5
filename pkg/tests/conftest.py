import pytest

from fracapprox.ifs import (
    cantor_middle_thirds,
    four_corner_dust,
    koch_curve,
    sierpinski_gasket,
)


@pytest.fixture(scope="session")
def cantor():
    return cantor_middle_thirds()


@pytest.fixture(scope="session")
def gasket():
    return sierpinski_gasket()


@pytest.fixture(scope="session")
def dust():
    return four_corner_dust()


@pytest.fixture(scope="session")
def koch():
    return koch_curve()
