from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from kpwindow.linalg import EchelonSpace, rank, sum_dim

columns = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
vectors = st.dictionaries(columns, st.integers(-3, 3).map(Fraction), min_size=1, max_size=4)
families = st.lists(vectors, min_size=1, max_size=5)


def _add(u, v):
    total = dict(u)
    for k, c in v.items():
        total[k] = total.get(k, Fraction(0)) + c
    return {k: c for k, c in total.items() if c}


@given(families, st.randoms(use_true_random=False))
def test_echelon_form_is_canonical(family, rnd):
    shuffled = list(family)
    rnd.shuffle(shuffled)
    shuffled.append(_add(family[0], family[-1]))
    assert EchelonSpace(family) == EchelonSpace(shuffled)


@given(families, st.data())
def test_echelon_form_ignores_order_and_scaling_of_generators(family, data):
    order = data.draw(st.permutations(range(len(family))))
    scale = st.sampled_from([-2, -1, Fraction(1, 2), 3])
    scales = data.draw(st.lists(scale, min_size=len(family), max_size=len(family)))
    rescaled = [{k: s * c for k, c in family[i].items()} for i, s in zip(order, scales)]
    assert EchelonSpace(rescaled) == EchelonSpace(family)


@given(families)
def test_rows_span_the_input(family):
    space = EchelonSpace(family)
    assert space.dim == rank(family)
    assert all(space.contains(v) for v in family)
    for pivot, row in zip(space.pivots, space.rows):
        assert row[pivot] == 1
        assert pivot == min(row)


@given(families)
def test_support_intersection(family):
    space = EchelonSpace(family)

    def allowed(k):
        return k[0] >= 0

    inside = space.intersect_support(allowed)
    assert inside.dim == space.intersection_dim(allowed)
    for row in inside.rows:
        assert all(allowed(k) for k in row)
        assert space.contains(row)


def test_intersection_of_two_lines():
    space = EchelonSpace([{(0,): 1, (1,): 1}, {(1,): 1, (2,): 1}])
    inside = space.intersect_support(lambda k: k != (1,))
    assert inside.dim == 1
    assert inside.contains({(0,): 1, (2,): -1})
    assert not inside.contains({(0,): 1})


def test_reduce_and_restricted_rank():
    space = EchelonSpace([{(0,): 2, (1,): 4}, {(2,): 1}])
    assert space.reduce({(0,): 1}) == {(1,): -2}
    assert space.restricted_rank(lambda k: k == (1,)) == 1
    assert space.restricted_rank(lambda k: k == (3,)) == 0


def test_empty_inputs():
    assert rank([]) == 0
    assert rank([{(0,): 0}]) == 0
    assert EchelonSpace().dim == 0
    assert sum_dim([{(0,): 1}], [{(0,): 2}, {(1,): 1}]) == 2
