from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from thetacert.intervals import RationalInterval

rats = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@st.composite
def intervals_with_point(draw):
    a, b, c = sorted(draw(st.lists(rats, min_size=3, max_size=3)))
    return RationalInterval(a, c), b


@given(intervals_with_point(), intervals_with_point())
def test_arithmetic_encloses_pointwise(p, q):
    (x, a), (y, b) = p, q
    assert a + b in x + y
    assert a - b in x - y
    assert a * b in x * y
    if not y.contains_zero():
        assert a / b in x / y


@given(intervals_with_point(), st.integers(1, 30))
def test_round_out_widens(p, bits):
    x, _ = p
    r = x.round_out(bits)
    assert x in r
    assert r.lo.denominator & (r.lo.denominator - 1) == 0


def test_decimal_is_outward():
    iv = RationalInterval(Fraction(1, 3), Fraction(2, 3))
    assert iv.decimal(4) == ("0.3333", "0.6667")
    assert RationalInterval.point(Fraction(-1, 3)).decimal(2) == ("-0.34", "-0.33")


def test_empty_and_reciprocal_errors():
    with pytest.raises(ValueError):
        RationalInterval(1, 0)
    with pytest.raises(ZeroDivisionError):
        RationalInterval(-1, 1).reciprocal()
