"""Json documents read and written by the command line.

Every input document is an object with a ``kind`` discriminator:

``subspace``
    ``{"kind": "subspace", "rank": 1,
    "box": {"t_lo": -3, "t_hi": 3, "u_lo": -4, "u_hi": 4},
    "thresholds": [[[n, d], ...], ...],
    "low_modes": [mode, ...], "high_modes": [mode, ...],
    "generators": [[[t, u, component, scalar], ...], ...]}``
    where ``d`` is an integer, ``"full"`` or ``null`` and a mode is
    ``"empty"``, ``"full"`` or ``{"slope": s, "intercept": c}``.
``series``
    ``{"kind": "series", "terms": [[t, u, scalar], ...], "t_cap": T,
    "u_caps": [[n, cap], ...], "t_floor": F}``; window fields may be null.
``operator``
    an element of Q[[x1, x2]]((d1^-1))((d2^-1)):
    ``{"kind": "operator", "x_caps": [N1, N2], "inner_floor": -8,
    "outer_floor": -8, "floor": F, "inner_floors": [[j, f], ...],
    "coefficients": [{"d1": i, "d2": j, "terms": [[k, l, scalar], ...],
    "caps": [N1, N2]}, ...]}`` for sum c_kl x1^k x2^l d1^i d2^j.
``pair``
    ring fields as for ``operator`` plus two operator bodies ``"L"`` and ``"M"``.

Scalars are ``"p/q"`` strings (or integers) and dual numbers are
``{"v": "p/q", "eps": "p/q"}``. Schema violations raise ``ValidationError``
with the path of the offending field.
"""
import json
import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

from kpwindow import defaults
from kpwindow.coefficients import format_rational, format_scalar, parse_rational, parse_scalar
from kpwindow.errors import ValidationError, nested
from kpwindow.hierarchy import ParshinPair, ParshinRing
from kpwindow.psdo import OperatorWindow
from kpwindow.series import BiSeriesWindow, TruncatedPowerSeries
from kpwindow.subspace import (
    FULL,
    AffineMode,
    BoundaryMode,
    Empty,
    EmptyMode,
    Full,
    FullMode,
    MonomialBox,
    WindowedSubspace,
)

logger = logging.getLogger(__name__)

KINDS = ("subspace", "series", "operator", "pair")


def _field(data: dict, key: str, path: str, default=ValueError):
    if key not in data:
        if default is ValueError:
            raise ValidationError(f"missing field '{key}'", path)
        return default
    return data[key]


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"expected an integer, got {value!r}", path)
    return value


def _optional_int(value, path: str) -> Optional[int]:
    return None if value is None else _int(value, path)


def _list(value, path: str, length: Optional[int] = None) -> list:
    if not isinstance(value, list):
        raise ValidationError(f"expected a list, got {type(value).__name__}", path)
    if length is not None and len(value) != length:
        raise ValidationError(f"expected {length} entries, got {len(value)}", path)
    return value


def _object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"expected an object, got {type(value).__name__}", path)
    return value


def _pairs(value, path: str) -> List[Tuple[int, Optional[int]]]:
    pairs = []
    for k, entry in enumerate(_list(value, path)):
        entry = _list(entry, f"{path}[{k}]", 2)
        pairs.append((_int(entry[0], f"{path}[{k}][0]"), _optional_int(entry[1], f"{path}[{k}][1]")))
    return pairs


def load_document(path: str, kinds: Iterable[str] = KINDS) -> dict:
    """Read a UTF-8 json document and check its ``kind``."""
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ValidationError("document not found", path)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid json at line {exc.lineno}, column {exc.colno}: {exc.msg}", path)
    data = _object(data, path)
    kind = _field(data, "kind", f"{path}:kind")
    kinds = tuple(kinds)
    if kind not in kinds:
        raise ValidationError(f"expected kind {' or '.join(kinds)}, got {kind!r}", f"{path}:kind")
    logger.debug(f"loaded {kind} document from {path}")
    return data


def dumps(data: Any) -> str:
    """Canonical json: sorted keys and fixed separators, so equal inputs give equal bytes."""
    return json.dumps(data, sort_keys=True, indent=2, separators=(",", ": "), ensure_ascii=False)


# series


def parse_series(data: dict, path: str = "series") -> BiSeriesWindow:
    terms = {}
    for k, entry in enumerate(_list(_field(data, "terms", path, []), f"{path}.terms")):
        where = f"{path}.terms[{k}]"
        entry = _list(entry, where, 3)
        position = (_int(entry[0], f"{where}[0]"), _int(entry[1], f"{where}[1]"))
        if position in terms:
            raise ValidationError(f"duplicate term t^{position[0]}u^{position[1]}", where)
        terms[position] = parse_scalar(entry[2], f"{where}[2]")
    u_caps = {}
    for n, cap in _pairs(_field(data, "u_caps", path, []), f"{path}.u_caps"):
        if cap is None:
            raise ValidationError(f"u-cap of level {n} must be an integer", f"{path}.u_caps")
        u_caps[n] = cap
    t_cap = _optional_int(_field(data, "t_cap", path, None), f"{path}.t_cap")
    t_floor = _optional_int(_field(data, "t_floor", path, None), f"{path}.t_floor")
    try:
        return BiSeriesWindow(terms, t_cap, u_caps, t_floor)
    except ValidationError as exc:
        raise nested(exc, path)


def series_to_dict(x: BiSeriesWindow) -> dict:
    return {
        "kind": "series",
        "terms": [[n, a, format_scalar(c)] for (n, a), c in sorted(x.terms.items())],
        "t_cap": x.t_cap,
        "u_caps": [[n, cap] for n, cap in sorted(x.u_caps.items())],
        "t_floor": x.t_floor,
    }


# subspaces


def parse_mode(value, path: str) -> BoundaryMode:
    if value == "empty":
        return Empty
    if value == "full":
        return Full
    if isinstance(value, dict):
        if set(value) != {"slope", "intercept"}:
            raise ValidationError("affine modes have exactly the keys 'slope' and 'intercept'", path)
        return AffineMode(_int(value["slope"], f"{path}.slope"), _int(value["intercept"], f"{path}.intercept"))
    raise ValidationError(f"expected 'empty', 'full' or an affine mode, got {value!r}", path)


def mode_to_json(mode: BoundaryMode):
    if isinstance(mode, EmptyMode):
        return "empty"
    if isinstance(mode, FullMode):
        return "full"
    return {"slope": mode.slope, "intercept": mode.intercept}


def _modes(value, rank: int, path: str) -> Tuple[BoundaryMode, ...]:
    if not isinstance(value, list):
        return (parse_mode(value, path),) * rank
    value = _list(value, path, rank)
    return tuple(parse_mode(v, f"{path}[{j}]") for j, v in enumerate(value))


def _threshold(value, path: str):
    if value == "full":
        return FULL
    return _optional_int(value, path)


def parse_subspace(data: dict, path: str = "subspace", default_box: Optional[MonomialBox] = None) -> WindowedSubspace:
    """A subspace document; ``default_box`` stands in for a missing ``box``."""
    rank = _int(_field(data, "rank", path, 1), f"{path}.rank")
    if "box" not in data and default_box is not None:
        box_data = {"t_lo": default_box.t_lo, "t_hi": default_box.t_hi,
                    "u_lo": default_box.u_lo, "u_hi": default_box.u_hi}
    else:
        box_data = _object(_field(data, "box", path), f"{path}.box")
    box_args = {key: _int(_field(box_data, key, f"{path}.box"), f"{path}.box.{key}")
                for key in ("t_lo", "t_hi", "u_lo", "u_hi")}
    try:
        box = MonomialBox(rank=rank, **box_args)
    except ValidationError as exc:
        raise nested(exc, f"{path}.box")

    thresholds: List[Dict[int, Any]] = []
    raw_thresholds = _field(data, "thresholds", path, [[] for _ in range(rank)])
    for j, levels in enumerate(_list(raw_thresholds, f"{path}.thresholds", rank)):
        per_level = {}
        for k, entry in enumerate(_list(levels, f"{path}.thresholds[{j}]")):
            where = f"{path}.thresholds[{j}][{k}]"
            entry = _list(entry, where, 2)
            per_level[_int(entry[0], f"{where}[0]")] = _threshold(entry[1], f"{where}[1]")
        thresholds.append(per_level)

    generators = []
    for g, generator in enumerate(_list(_field(data, "generators", path, []), f"{path}.generators")):
        vector: Dict[Tuple[int, int, int], Fraction] = {}
        for k, entry in enumerate(_list(generator, f"{path}.generators[{g}]")):
            where = f"{path}.generators[{g}][{k}]"
            entry = _list(entry, where, 4)
            key = tuple(_int(entry[i], f"{where}[{i}]") for i in range(3))
            vector[key] = vector.get(key, Fraction(0)) + parse_rational(entry[3], f"{where}[3]")
        generators.append(vector)

    low = _modes(_field(data, "low_modes", path, "empty"), rank, f"{path}.low_modes")
    high = _modes(_field(data, "high_modes", path, "empty"), rank, f"{path}.high_modes")
    try:
        return WindowedSubspace(box, generators, thresholds, low, high)
    except ValidationError as exc:
        raise nested(exc, path)


def _threshold_to_json(d):
    return "full" if d is FULL else d


def subspace_to_dict(w: WindowedSubspace) -> dict:
    box = w.box
    return {
        "kind": "subspace",
        "rank": w.rank,
        "box": {"t_lo": box.t_lo, "t_hi": box.t_hi, "u_lo": box.u_lo, "u_hi": box.u_hi},
        "thresholds": [
            [[n, _threshold_to_json(d)] for n, d in sorted(levels.items())] for levels in w.tail.thresholds
        ],
        "low_modes": [mode_to_json(mode) for mode in w.tail.low_modes],
        "high_modes": [mode_to_json(mode) for mode in w.tail.high_modes],
        "generators": [
            [[n, a, j, format_rational(c)] for (n, a, j), c in sorted(g.items())] for g in w.generator_vectors()
        ],
    }


# operators in Q[[x1, x2]]((d1^-1))((d2^-1))


def parse_ring(data: dict, path: str, default_floor: int = defaults.FLOOR) -> ParshinRing:
    caps = _list(_field(data, "x_caps", path, [None, None]), f"{path}.x_caps", 2)
    x_caps = tuple(_optional_int(c, f"{path}.x_caps[{k}]") for k, c in enumerate(caps))
    inner_floor = _int(_field(data, "inner_floor", path, default_floor), f"{path}.inner_floor")
    outer_floor = _int(_field(data, "outer_floor", path, default_floor), f"{path}.outer_floor")
    try:
        return ParshinRing(x_caps, inner_floor, outer_floor)
    except ValidationError as exc:
        raise nested(exc, path)


def parse_operator_body(ring: ParshinRing, data: dict, path: str) -> OperatorWindow:
    data = _object(data, path)
    by_outer: Dict[int, Dict[int, TruncatedPowerSeries]] = {}
    for k, block in enumerate(_list(_field(data, "coefficients", path, []), f"{path}.coefficients")):
        where = f"{path}.coefficients[{k}]"
        block = _object(block, where)
        i = _int(_field(block, "d1", where), f"{where}.d1")
        j = _int(_field(block, "d2", where), f"{where}.d2")
        caps = ring.scalars.caps
        if "caps" in block:
            raw = _list(block["caps"], f"{where}.caps", 2)
            caps = tuple(_optional_int(c, f"{where}.caps[{m}]") for m, c in enumerate(raw))
        terms = {}
        for m, entry in enumerate(_list(_field(block, "terms", where), f"{where}.terms")):
            entry = _list(entry, f"{where}.terms[{m}]", 3)
            exponent = (_int(entry[0], f"{where}.terms[{m}][0]"), _int(entry[1], f"{where}.terms[{m}][1]"))
            if exponent[0] < 0 or exponent[1] < 0:
                raise ValidationError("x-exponents must be non-negative", f"{where}.terms[{m}]")
            terms[exponent] = terms.get(exponent, Fraction(0)) + parse_rational(entry[2], f"{where}.terms[{m}][2]")
        if i in by_outer.get(j, {}):
            raise ValidationError(f"duplicate coefficient of d1^{i} d2^{j}", where)
        by_outer.setdefault(j, {})[i] = TruncatedPowerSeries(terms, caps)
    inner_floors = dict(_pairs(_field(data, "inner_floors", path, []), f"{path}.inner_floors"))
    for j in inner_floors:
        by_outer.setdefault(j, {})
    floor = _optional_int(_field(data, "floor", path, None), f"{path}.floor")
    coefficients = {j: ring.inner.make(inner, inner_floors.get(j)) for j, inner in by_outer.items()}
    return ring.outer.make(coefficients, floor)


def operator_body(ring: ParshinRing, a: OperatorWindow) -> dict:
    blocks = []
    inner_floors = []
    for j in sorted(a.coefficients):
        inner = a.coefficients[j]
        if inner.floor is not None:
            inner_floors.append([j, inner.floor])
        for i in sorted(inner.coefficients):
            series = inner.coefficients[i]
            block = {
                "d1": i,
                "d2": j,
                "terms": [[k, l, format_rational(c)] for (k, l), c in sorted(series.terms.items())],
            }
            if series.caps != ring.scalars.caps:
                block["caps"] = list(series.caps)
            blocks.append(block)
    return {"coefficients": blocks, "inner_floors": inner_floors, "floor": a.floor}


def _ring_fields(ring: ParshinRing) -> dict:
    return {
        "x_caps": list(ring.scalars.caps),
        "inner_floor": ring.inner.default_floor,
        "outer_floor": ring.outer.default_floor,
    }


def parse_operator(data: dict, path: str = "operator", default_floor: int = defaults.FLOOR) -> Tuple[ParshinRing, OperatorWindow]:
    ring = parse_ring(data, path, default_floor)
    return ring, parse_operator_body(ring, data, path)


def operator_to_dict(ring: ParshinRing, a: OperatorWindow) -> dict:
    return {"kind": "operator", **_ring_fields(ring), **operator_body(ring, a)}


def parse_pair(data: dict, path: str = "pair", default_floor: int = defaults.FLOOR) -> Tuple[ParshinRing, ParshinPair]:
    ring = parse_ring(data, path, default_floor)
    lax = parse_operator_body(ring, _field(data, "L", path), f"{path}.L")
    companion = parse_operator_body(ring, _field(data, "M", path), f"{path}.M")
    return ring, ParshinPair(lax, companion)


def pair_to_dict(ring: ParshinRing, pair: ParshinPair) -> dict:
    return {
        "kind": "pair",
        **_ring_fields(ring),
        "L": operator_body(ring, pair.L),
        "M": operator_body(ring, pair.M),
    }


def parse(
    data: dict,
    path: str = "document",
    default_box: Optional[MonomialBox] = None,
    default_floor: int = defaults.FLOOR,
):
    """Dispatch on ``kind``; operators and pairs come back with their ring."""
    kind = data.get("kind")
    if kind == "subspace":
        return parse_subspace(data, path, default_box)
    if kind == "series":
        return parse_series(data, path)
    if kind == "operator":
        return parse_operator(data, path, default_floor)
    if kind == "pair":
        return parse_pair(data, path, default_floor)
    raise ValidationError(f"unknown document kind {kind!r}", f"{path}.kind")


def read_document(
    path: str,
    kinds: Iterable[str] = KINDS,
    default_box: Optional[MonomialBox] = None,
    default_floor: int = defaults.FLOOR,
):
    """load_document followed by parse."""
    return parse(load_document(path, kinds), path, default_box, default_floor)
