from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kpwindow.coefficients import (
    DualNumber,
    dual_inverse,
    format_rational,
    format_scalar,
    invert,
    parse_dual,
    parse_rational,
    parse_scalar,
    rational_arith,
)
from kpwindow.errors import NotInvertibleError, ValidationError, ZeroDivisorError

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=20)
duals = st.builds(DualNumber, rationals, rationals)


def test_rational_arith():
    assert rational_arith(Fraction(1, 2), Fraction(1, 3), "add") == Fraction(5, 6)
    assert rational_arith(Fraction(1, 2), Fraction(1, 3), "sub") == Fraction(1, 6)
    assert rational_arith(Fraction(2, 3), Fraction(3, 4), "mul") == Fraction(1, 2)
    assert rational_arith(Fraction(2, 3), Fraction(4, 3), "div") == Fraction(1, 2)


def test_rational_division_by_zero():
    with pytest.raises(ZeroDivisorError):
        rational_arith(Fraction(1), Fraction(0), "div")


def test_unknown_operation():
    with pytest.raises(ValidationError):
        rational_arith(Fraction(1), Fraction(1), "pow")


def test_eps_squares_to_zero():
    eps = DualNumber(0, 1)
    assert eps * eps == DualNumber(0, 0)
    assert not eps * eps


def test_dual_inverse():
    x = DualNumber(2, 3)
    inverse = dual_inverse(x)
    assert inverse == DualNumber(Fraction(1, 2), Fraction(-3, 4))
    assert x * inverse == 1


def test_nilpotent_is_not_invertible():
    with pytest.raises(NotInvertibleError):
        dual_inverse(DualNumber(0, 5))
    with pytest.raises(NotInvertibleError):
        invert(Fraction(0))


@given(duals, duals, duals)
def test_dual_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(duals)
def test_units_invert(x):
    if x.is_unit():
        assert x * invert(x) == 1
    else:
        with pytest.raises(NotInvertibleError):
            invert(x)


@given(rationals)
def test_rational_text_format(x):
    assert parse_rational(format_rational(x)) == x


def test_parse_rational_forms():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(-4) == Fraction(-4)
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(Fraction(5)) == "5"


@pytest.mark.parametrize("bad", ["0.5", "1e3", "x", "1/0", True, None, 1.5])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValidationError):
        parse_rational(bad, "terms[0][2]")


def test_parse_rational_reports_path():
    with pytest.raises(ValidationError) as excinfo:
        parse_rational("0.25", "series.terms[3][2]")
    assert excinfo.value.path == "series.terms[3][2]"
    assert "series.terms[3][2]" in str(excinfo.value)


def test_dual_documents():
    assert parse_dual({"v": "1/2", "eps": "3"}) == DualNumber(Fraction(1, 2), 3)
    assert format_scalar(DualNumber(1, Fraction(-1, 3))) == {"v": "1", "eps": "-1/3"}
    assert parse_scalar("7/2") == Fraction(7, 2)
    with pytest.raises(ValidationError):
        parse_dual({"v": "1"}, "x")
