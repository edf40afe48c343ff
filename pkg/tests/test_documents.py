import json
from fractions import Fraction

import pytest

from conftest import projective_plane_document, series_document
from kpwindow.cohomology import picture_cohomology
from kpwindow.corpus import named_subspaces, random_corpus
from kpwindow.documents import (
    dumps,
    mode_to_json,
    operator_to_dict,
    parse,
    parse_mode,
    read_document,
    series_to_dict,
    subspace_to_dict,
)
from kpwindow.errors import ValidationError
from kpwindow.hierarchy import ParshinRing
from kpwindow.series import BiSeriesWindow
from kpwindow.subspace import AffineMode, Empty, Full, MonomialBox, WindowedSubspace


def _through_json(data):
    return json.loads(dumps(data))


def test_subspaces_survive_a_round_trip():
    for w in list(named_subspaces().values()) + random_corpus(5, 10):
        document = subspace_to_dict(w)
        again = parse(_through_json(document), "w.json")
        assert subspace_to_dict(again) == document
        assert picture_cohomology(again).dims == picture_cohomology(w).dims


def test_series_round_trip():
    x = BiSeriesWindow({(0, 0): 1, (1, -1): Fraction(1, 2)}, t_cap=3, u_caps={0: 4})
    assert parse(_through_json(series_to_dict(x)), "x.json") == x


def test_operator_round_trip():
    ring = ParshinRing()
    a = ring.element({(0, 0): ring.scalars.one(), (-1, -1): ring.series({(1, 0): 2})})
    document = operator_to_dict(ring, a)
    parsed_ring, parsed = parse(_through_json(document), "a.json")
    assert operator_to_dict(parsed_ring, parsed) == document


@pytest.mark.parametrize("mode", [Empty, Full, AffineMode(-1, 2)])
def test_modes_round_trip(mode):
    assert parse_mode(mode_to_json(mode), "mode") == mode


def test_parse_dispatches_on_kind():
    assert isinstance(parse(projective_plane_document(), "w.json"), WindowedSubspace)
    assert parse(series_document([[0, 1, "2"]]), "x.json").terms == {(0, 1): 2}
    with pytest.raises(ValidationError) as excinfo:
        parse({"kind": "matrix"}, "m.json")
    assert excinfo.value.path == "m.json.kind"


def test_missing_box_uses_the_default():
    box = MonomialBox(-2, 2, -3, 3)
    assert parse({"kind": "subspace"}, "w.json", default_box=box).box == box
    with pytest.raises(ValidationError) as excinfo:
        parse({"kind": "subspace"}, "w.json")
    assert excinfo.value.path == "w.json"


def test_read_document_checks_the_kind(write_document):
    path = write_document("w.json", projective_plane_document())
    assert read_document(path, ("subspace",)).rank == 1
    with pytest.raises(ValidationError) as excinfo:
        read_document(path, ("series",))
    assert excinfo.value.path == f"{path}:kind"
