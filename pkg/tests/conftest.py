from fractions import Fraction

import pytest

import badapprox as ba


@pytest.fixture(scope="session")
def half_pair():
    return ba.ExponentPair.make(Fraction(1, 2), Fraction(1, 2))


@pytest.fixture(scope="session")
def parabola():
    return ba.CurveSpec.parabola()


@pytest.fixture(scope="session")
def params4(parabola, half_pair):
    return ba.derive_params(half_pair, 4, parabola.C0)


@pytest.fixture(scope="session")
def params2(parabola, half_pair):
    # R = 2 keeps heights small enough that nonempty classes exist early
    return ba.derive_params(half_pair, 2, parabola.C0)


@pytest.fixture(scope="session")
def tree_depth5(parabola, params4):
    return ba.build_survivors(parabola, params4, 5)
