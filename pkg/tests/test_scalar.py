from fractions import Fraction

import pytest

from fixlab.errors import ParameterError
from fixlab.scalar import EXACT, Epsilon, format_scalar, parse_rational, ratio


@pytest.mark.parametrize(
    "text, expected",
    [("3/5", Fraction(3, 5)), ("-7", Fraction(-7)), ("0.65", Fraction(13, 20)), (" 6/8 ", Fraction(3, 4))],
)
def test_parse_rational(text, expected):
    value = parse_rational(text)
    assert value == expected
    assert value.denominator > 0


@pytest.mark.parametrize("bad", ["abc", "1/0", "", "3//5"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ParameterError):
        parse_rational(bad)


def test_float_is_not_silently_parsed():
    with pytest.raises(ParameterError):
        parse_rational(0.5)


def test_format_round_trip():
    for v in [Fraction(7, 16), Fraction(-3, 16), Fraction(5)]:
        assert parse_rational(format_scalar(v)) == v
    assert format_scalar(0.1) == "0.1"
    assert format_scalar(None) is None


def test_exact_policy_is_strict():
    a = Fraction(1, 3)
    assert not EXACT.lt(a, a)
    assert EXACT.le(a, a)
    assert EXACT.lt(a, a + Fraction(1, 10**30))


def test_epsilon_policy_convention():
    pol = Epsilon(1e-9)
    assert pol.le(1.0 + 5e-10, 1.0)
    assert not pol.lt(1.0 - 5e-10, 1.0)
    assert pol.lt(1.0 - 2e-9, 1.0)
    assert pol.is_zero(-1e-10)
    with pytest.raises(ParameterError):
        Epsilon(-1.0)


def test_ratio_zero_denominator_and_exactness():
    assert ratio(Fraction(1), Fraction(0)) == 0
    assert ratio(3, 4) == Fraction(3, 4)
    assert isinstance(ratio(1.0, 4), float)
