import random
from fractions import Fraction

import pytest

from kpwindow.coefficients import DualNumber
from kpwindow.errors import NotInvertibleError, PrecisionError, ValidationError
from kpwindow.hierarchy import (
    DiffPolynomialRing,
    ParshinPair,
    ParshinRing,
    action_base_cases,
    action_is_multiplicative,
    apply_to_field,
    derive_kdv,
    derive_kp,
    dress,
    flow_well_posed,
    flows_commute,
    kp_flow,
    operator_inverse,
    parshin_flow,
    random_field_term,
    random_lax,
    random_monic,
)
from kpwindow.series import BiSeriesWindow, monomial


@pytest.fixture
def parshin():
    return ParshinRing()


def test_total_derivative_obeys_leibniz():
    ring = DiffPolynomialRing(2)
    product = ring.a(1) * ring.a(2)
    assert ring.derive(product) == ring.a(1, 1) * ring.a(2) + ring.a(1) * ring.a(2, 1)


def test_coefficients_beyond_depth_are_not_retained():
    ring = DiffPolynomialRing(3, order_cap=4)
    with pytest.raises(PrecisionError):
        ring.a(4)
    with pytest.raises(PrecisionError):
        ring.a(1, 5)


def test_descriptor_round_trip():
    ring = DiffPolynomialRing(2)
    p = ring.scalar(Fraction(3, 2)) * ring.a(1) ** 2 * ring.a(2, 1) - ring.a(1, 3)
    assert ring.from_descriptor(ring.to_descriptor(p)) == p


def test_descriptor_errors_carry_path():
    ring = DiffPolynomialRing(2)
    with pytest.raises(ValidationError) as excinfo:
        ring.from_descriptor([[[[1, 0, -1]], "1"]], "flow")
    assert excinfo.value.path == "flow[0][0]"


def test_first_flow_is_the_x_derivative():
    ring = DiffPolynomialRing(4)
    flow = kp_flow(1, 4, ring)
    assert flow.images == {i: ring.a(i, 1) for i in range(1, 4)}


def test_second_flow_of_a1():
    ring = DiffPolynomialRing(4)
    flow = kp_flow(2, 4, ring)
    assert flow.images[1] == ring.a(1, 2) + ring.scalar(2) * ring.a(2, 1)
    with pytest.raises(PrecisionError):
        flow.image(3)


def test_flow_index_checks():
    with pytest.raises(ValidationError):
        kp_flow(0, 4)
    with pytest.raises(PrecisionError):
        kp_flow(4, 4)


def test_flows_commute():
    assert flows_commute(2, 3, 6)


def test_kp_identity():
    result = derive_kp()
    assert result.vanishes
    assert result.depth <= 12


def test_kp_identity_with_wrong_coefficient():
    assert not derive_kp(rhs_coefficient=2).vanishes


def test_kp_depth_cap_too_small():
    with pytest.raises(PrecisionError):
        derive_kp(depth_cap=3)


def test_kdv_reduction():
    report = derive_kdv()
    assert report.coefficient == 1
    assert report.consistent
    assert report.check_depth == report.depth + 1
    assert not report.matches_printed
    assert report.even_flow_vanishes


@pytest.mark.parametrize("seed", range(5))
def test_flows_of_random_lax_operators_are_well_posed(seed):
    operators, lax = random_lax(random.Random(seed), depth=3)
    for n in range(1, 6):
        assert flow_well_posed(operators, lax, n)


def test_field_action_basics(parshin):
    one = monomial(0, 0)
    assert apply_to_field(parshin, parshin.delta2(-1), one).terms == {(1, 0): 1}
    assert apply_to_field(parshin, parshin.delta1(-1), one).terms == {(0, 1): 1}
    assert apply_to_field(parshin, parshin.x(0), one).terms == {}
    assert apply_to_field(parshin, parshin.x(0), monomial(0, 1)).terms == {(0, 2): 1}
    assert apply_to_field(parshin, parshin.delta1(), monomial(0, 1)).terms == {(0, 0): 1}
    assert action_base_cases(parshin)


def test_field_action_is_a_module_action(parshin):
    one = monomial(0, 0)
    nested = apply_to_field(parshin, parshin.delta1(-1), apply_to_field(parshin, parshin.delta2(-1), one))
    assert nested.terms == {(1, 1): 1}

    a, b = parshin.x(1), parshin.delta2(-1)
    stepwise = apply_to_field(parshin, a, apply_to_field(parshin, b, one))
    composed = apply_to_field(parshin, parshin.compose(a, b), one)
    assert stepwise.terms == composed.terms == {(2, 0): 1}


def test_dual_coefficients_cannot_be_lifted(parshin):
    with pytest.raises(ValidationError):
        parshin.lift(BiSeriesWindow({(0, 0): DualNumber(1, 1)}))


def test_operator_inverse(parshin):
    inverse = operator_inverse(parshin, parshin.delta1())
    assert parshin.vanishes(parshin.outer.sub(inverse, parshin.delta1(-1)))
    with pytest.raises(NotInvertibleError):
        operator_inverse(parshin, parshin.delta2())


def test_trivial_pair_flows_vanish(parshin):
    pair = ParshinPair(parshin.delta1(), parshin.delta2())
    assert pair.admissible(parshin)
    flow_l, flow_m = parshin_flow(parshin, pair, 1, 1)
    assert parshin.vanishes(flow_l)
    assert parshin.vanishes(flow_m)


def test_flow_index_constraints(parshin):
    pair = ParshinPair(parshin.delta1(), parshin.delta2())
    with pytest.raises(ValidationError):
        parshin_flow(parshin, pair, 0, -1)
    with pytest.raises(ValidationError):
        parshin_flow(parshin, pair, 3, 1, alpha=1)
    with pytest.raises(ValidationError):
        parshin_flow(parshin, pair, 0, 1, alpha=0)


def test_non_admissible_pair_is_rejected(parshin):
    pair = ParshinPair(parshin.delta1(), parshin.x(0))
    assert not pair.admissible(parshin)
    with pytest.raises(ValidationError):
        parshin_flow(parshin, pair, 1, 0)


def test_dressing_gives_an_admissible_pair():
    ring = ParshinRing(inner_floor=-4, outer_floor=-4)
    s = ring.element({(0, 0): ring.scalars.one(), (0, -1): ring.scalars.x(1)})
    pair = dress(ring, s)
    assert pair.admissible(ring)


@pytest.mark.slow
def test_flow_well_posedness_sweep():
    rng = random.Random(2024)
    for _ in range(50):
        operators, lax = random_lax(rng, rng.randint(1, 6), floor=-8)
        assert all(flow_well_posed(operators, lax, n) for n in range(1, 6))


@pytest.mark.slow
def test_dressing_sweep():
    rng = random.Random(7)
    ring = ParshinRing(inner_floor=-4, outer_floor=-4)
    for _ in range(25):
        assert dress(ring, random_monic(ring, rng)).admissible(ring)


@pytest.mark.slow
def test_field_action_sweep(parshin):
    rng = random.Random(11)
    for _ in range(25):
        a, b = random_field_term(parshin, rng), random_field_term(parshin, rng)
        f = monomial(rng.randint(0, 2), rng.randint(0, 2))
        assert action_is_multiplicative(parshin, a, b, f)
