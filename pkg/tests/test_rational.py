from fractions import Fraction

import pytest

from relurelax.rational import format_rational, parse_rational


def test_parse_integer():
    assert parse_rational("3") == Fraction(3)
    assert parse_rational("-7") == Fraction(-7)


def test_parse_fraction():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational("-5/10") == Fraction(-1, 2)


def test_parse_whitespace():
    assert parse_rational(" 1/3 ") == Fraction(1, 3)


def test_parse_decimal_strings_exactly():
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational("1.5") == Fraction(3, 2)


def test_parse_rejects_bad_literals():
    for bad in ("nan", "inf", "", "1/0", "a/b"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        parse_rational(0.5)


def test_format_roundtrip():
    for q in (Fraction(0), Fraction(7), Fraction(-3, 2), Fraction(22, 7)):
        assert parse_rational(format_rational(q)) == q


def test_format_integers_bare():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-6, 3)) == "-2"
