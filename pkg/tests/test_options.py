from tropbn.utils import parse_value, parse_rational, format_rational, split_list

from fractions import Fraction
import typing as ty
import pytest

def test_parse_simple():
    assert True == parse_value("True", bool)
    assert "foo" == parse_value("foo", str)
    assert 60 == parse_value("60", int)
    assert Fraction(-3, 4) == parse_value("-3/4", Fraction)
    assert None == parse_value("None", int | None)
    assert 5 == parse_value("5", int | None)

def test_parse_complex():
    assert [1,2] == parse_value("[1,2]", list)
    assert [1,2] == parse_value("[1,2]", list[int])
    assert (1,2) == parse_value("[1,2]", ty.Sequence)
    assert (1,2) == parse_value("[1,2]", ty.Sequence[int])
    assert (3, 0) == parse_value("(3,0)", tuple[int, ...])
    assert {"a": Fraction(1, 2)} == parse_value("{a: 1/2}", dict[str, Fraction])

def test_parse_any():
    assert parse_value("7", ty.Any) == 7
    assert parse_value("7/2", ty.Any) == Fraction(7, 2)
    assert parse_value("false", ty.Any) is False
    assert parse_value("[1, 1/3]", ty.Any) == [1, Fraction(1, 3)]

def test_split_list():
    assert split_list("1,(2,3),[4,5]") == ["1", "(2,3)", "[4,5]"]

def test_rational_round_trip():
    for text in ("0", "5", "-7/3", "1/64"):
        assert format_rational(parse_rational(text)) == text
    assert format_rational(Fraction(6, 4)) == "3/2"

@pytest.mark.parametrize("text", ["1/0", "x", "1.5", "", "2/y"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)

def test_parse_rational_rejects_bool():
    with pytest.raises(ValueError):
        parse_rational(True)
