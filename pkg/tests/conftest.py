import json
from fractions import Fraction

import pytest

from kpwindow.subspace import MonomialBox, WindowedSubspace

SMALL_BOX = MonomialBox(-2, 2, -2, 2)


def monomial_subspace(monomials, box=SMALL_BOX, thresholds=None, low=None, high=None):
    """W spanned by single monomials (n, a, j) plus an optional tail."""
    kwargs = {}
    if low is not None:
        kwargs["low_modes"] = low
    if high is not None:
        kwargs["high_modes"] = high
    return WindowedSubspace(box, [{m: Fraction(1)} for m in monomials], thresholds, **kwargs)


def single_generator_document():
    return {
        "kind": "subspace",
        "rank": 1,
        "box": {"t_lo": -3, "t_hi": 3, "u_lo": -4, "u_hi": 4},
        "generators": [[[0, -1, 0, "1"], [-1, 0, 0, "1"]]],
    }


def projective_plane_document():
    return {
        "kind": "subspace",
        "rank": 1,
        "box": {"t_lo": -2, "t_hi": 2, "u_lo": -3, "u_hi": 3},
        "thresholds": [[[n, -n] for n in range(-2, 2)]],
        "low_modes": {"slope": -1, "intercept": 0},
        "high_modes": [{"slope": -1, "intercept": 0}],
    }


def series_document(terms, **window):
    return {"kind": "series", "terms": terms, **window}


@pytest.fixture
def write_document(tmp_path):
    """Write a json document under tmp_path and return its path as a string."""

    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return write
