from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kpwindow.coefficients import DualNumber
from kpwindow.errors import NotInvertibleError, PrecisionError, ValidationError
from kpwindow.series import (
    BiSeriesWindow,
    LaurentWindow,
    PowerSeriesRing,
    TruncatedPowerSeries,
    agrees_with,
    bi_add,
    bi_inverse,
    bi_mul,
    derivation_x,
    dual_lift,
    leading_term,
    monomial,
    restrict,
    split_dual,
    t_order,
    truncated,
    zero_series,
)

exact_terms = st.dictionaries(
    st.tuples(st.integers(0, 4)), st.integers(-5, 5).map(Fraction), max_size=4
)
bi_terms = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.sampled_from([-3, -2, -1, 1, 2, 3]).map(Fraction), max_size=4
)
units = bi_terms.filter(bool).map(BiSeriesWindow)
windows = bi_terms.map(BiSeriesWindow)


def test_truncated_product_drops_terms_beyond_cap():
    x = TruncatedPowerSeries({(0,): 1, (1,): 1}, (3,))
    square = x * x
    assert square.terms == {(0,): 1, (1,): 2, (2,): 1}
    cube = square * x
    assert cube.terms == {(0,): 1, (1,): 3, (2,): 3}
    assert cube.caps == (3,)


def test_derivative_lowers_cap():
    x = TruncatedPowerSeries({(2, 1): 3}, (4, None))
    dx = x.derive(0)
    assert dx.terms == {(1, 1): 6}
    assert dx.caps == (3, None)
    assert x.derive(1).caps == (4, None)


def test_negative_exponent_rejected():
    with pytest.raises(ValidationError):
        TruncatedPowerSeries({(-1,): 1}, (None,))


@given(exact_terms, exact_terms)
def test_leibniz_rule(f_terms, g_terms):
    ring = PowerSeriesRing(1)
    f, g = ring.element(f_terms), ring.element(g_terms)
    assert ring.derive(f * g) == ring.derive(f) * g + f * ring.derive(g)


def test_monomial_inverse_is_exact():
    x = monomial(2, -1, Fraction(3))
    inverse = bi_inverse(x)
    assert inverse.is_exact
    assert inverse.terms == {(-2, 1): Fraction(1, 3)}


def test_geometric_inverse_window():
    inverse = bi_inverse(BiSeriesWindow({(0, 0): 1, (1, 0): -1}), t_cap=4, u_cap=4)
    assert inverse.t_cap == 4
    assert inverse.terms == {(k, 0): 1 for k in range(4)}


def test_inverse_times_element_is_one_on_window():
    x = BiSeriesWindow({(0, 0): 1, (0, 1): 1, (1, 0): 1})
    product = bi_mul(x, bi_inverse(x))
    assert product.terms == {(0, 0): 1}
    assert agrees_with(product, monomial(0, 0))
    assert product.t_cap == 8


def test_inverse_of_zero_or_nilpotent():
    with pytest.raises(NotInvertibleError):
        bi_inverse(zero_series())
    with pytest.raises(NotInvertibleError):
        bi_inverse(monomial(0, 0, DualNumber(0, 1)))


def test_terms_outside_window_are_rejected():
    with pytest.raises(ValidationError):
        BiSeriesWindow({(3, 0): 1}, t_cap=2)
    with pytest.raises(ValidationError):
        BiSeriesWindow({(0, 5): 1}, u_caps={0: 4})


def test_truncated_window_knows_only_its_region():
    x = truncated({(0, 0): 1, (0, 9): 2, (5, 0): 1}, t_cap=3, u_cap=4, t_floor=0)
    assert x.terms == {(0, 0): 1}
    assert x.knows(1, 3)
    assert not x.knows(1, 4)
    assert not x.knows(3, 0)
    assert x.knows(-5, 100)
    with pytest.raises(PrecisionError):
        x.coefficient(0, 4)


def test_sum_takes_the_smaller_window():
    x = truncated({(0, 0): 1}, t_cap=3, u_cap=4, t_floor=0)
    y = truncated({(1, 1): 1}, t_cap=2, u_cap=6, t_floor=0)
    total = bi_add(x, y)
    assert total.t_cap == 2
    assert total.u_caps == {0: 4, 1: 4}
    assert total.terms == {(0, 0): 1, (1, 1): 1}


def test_restrict_never_gains_knowledge():
    x = truncated({(0, 0): 1, (1, 2): 3}, t_cap=4, u_cap=4, t_floor=0)
    smaller = restrict(x, t_cap=2, u_cap=2)
    assert smaller.t_cap == 2
    assert smaller.terms == {(0, 0): 1}
    assert restrict(x, t_cap=10).t_cap == 4


def test_order_and_leading_term():
    x = BiSeriesWindow({(1, 3): 2, (1, -1): 5, (2, -4): 1})
    assert t_order(x) == 1
    assert leading_term(x) == (1, -1, 5)
    with pytest.raises(ValidationError):
        t_order(zero_series())


def test_order_undetermined_below_truncated_level():
    x = BiSeriesWindow({(1, 0): 1}, u_caps={0: 2}, t_floor=0)
    with pytest.raises(PrecisionError):
        t_order(x)


def test_exhausted_window():
    assert BiSeriesWindow({}, t_cap=0, t_floor=0).exhausted
    assert not monomial(0, 0).exhausted


def test_dual_split_and_lift():
    value = BiSeriesWindow({(0, 0): 1, (1, 0): 2})
    infinitesimal = BiSeriesWindow({(0, 1): 3})
    lifted = dual_lift(value, infinitesimal)
    assert lifted.terms[(0, 1)] == DualNumber(0, 3)
    back_value, back_eps = split_dual(lifted)
    assert back_value.terms == value.terms
    assert back_eps.terms == infinitesimal.terms


def test_derivation_x():
    ring = PowerSeriesRing(1)
    assert derivation_x(ring.element({(2,): 1})).terms == {(1,): 2}
    assert not derivation_x(ring.scalar(5)).terms
    assert derivation_x(TruncatedPowerSeries({(2,): 1}, (4,))).caps == (3,)
    with pytest.raises(ValidationError):
        derivation_x(PowerSeriesRing(2).x(0))


@given(exact_terms)
def test_derivation_x_of_x_times_f(f_terms):
    ring = PowerSeriesRing(1)
    f = ring.element(f_terms)
    assert derivation_x(ring.x(0) * f) == f + ring.x(0) * derivation_x(f)


def test_product_examples():
    product = bi_mul(BiSeriesWindow({(0, -1): 1, (1, 0): 1}), monomial(1, 0))
    assert product.is_exact
    assert product.terms == {(1, -1): 1, (2, 0): 1}
    x = BiSeriesWindow({(0, 0): 3, (1, 2): -1}, t_cap=4, u_caps={0: 6})
    assert bi_mul(x, monomial(0, 0)) == x


def test_geometric_cancellation_inside_the_window():
    alternating = truncated({(0, k): (-1) ** k for k in range(5)}, t_cap=1, u_cap=5, t_floor=0)
    product = bi_mul(BiSeriesWindow({(0, 0): 1, (0, 1): 1}), alternating)
    assert product.terms == {(0, 0): 1}
    assert product.t_cap == 1
    assert product.u_caps == {0: 5}


def test_order_examples():
    assert t_order(BiSeriesWindow({(3, 0): 1, (3, 1): 1})) == 3
    assert t_order(BiSeriesWindow({(0, -2): 1, (1, 0): 1})) == 0


@given(windows, windows, windows)
def test_ring_axioms(x, y, z):
    assert bi_mul(bi_mul(x, y), z).terms == bi_mul(x, bi_mul(y, z)).terms
    assert bi_mul(x, y).terms == bi_mul(y, x).terms
    assert bi_mul(x, bi_add(y, z)).terms == bi_add(bi_mul(x, y), bi_mul(x, z)).terms


@given(units, units)
def test_order_is_additive(x, y):
    assert t_order(bi_mul(x, y)) == t_order(x) + t_order(y)


@given(windows, windows, st.integers(-2, 3), st.integers(-2, 3))
def test_smaller_input_window_never_changes_known_coefficients(x, y, t_cap, u_cap):
    full = bi_mul(x, y)
    smaller = bi_mul(restrict(x, t_cap=t_cap, u_cap=u_cap), y)
    assert agrees_with(smaller, full)
    for position, c in smaller.terms.items():
        assert full.terms.get(position, 0) == c


def test_level_of_a_window():
    x = truncated({(0, 0): 1, (0, 2): 3, (1, 1): 2}, t_cap=3, u_cap=4, t_floor=0)
    assert x.level(0) == LaurentWindow({0: 1, 2: 3}, known_below=None, known_up_to=4)
    assert x.level(1).valuation() == 1
    assert not x.level(0).is_exact
    exact = monomial(2, -1).level(2)
    assert exact.is_exact
    assert exact.valuation() == -1
    assert monomial(2, -1).level(0).valuation() is None
