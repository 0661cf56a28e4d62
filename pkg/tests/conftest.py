import pytest

from ellbrauer.curves import Curve
from ellbrauer.fields import FieldElement, extend_field, make_prime_field, make_rationals


@pytest.fixture(scope="session")
def F7():
    return make_prime_field(7, 3)


@pytest.fixture(scope="session")
def F13():
    return make_prime_field(13, 3)


@pytest.fixture(scope="session")
def kw():
    """QQ(w) with w a primitive cube root of unity, rho = w."""
    QQ = make_rationals(3)
    k = extend_field(QQ, [1, 1, 1], "w")
    k.rho = k.gen()
    return k


@pytest.fixture(scope="session")
def E7(F7):
    """y^2 = x^3 + 2 over F7: nine rational points, full 3-torsion."""
    return Curve(F7, FieldElement(F7, 0), FieldElement(F7, 2))


@pytest.fixture(scope="session")
def E16(kw):
    """y^2 = x^3 + 16 over QQ(w): rational 3-torsion."""
    return Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(16)))
