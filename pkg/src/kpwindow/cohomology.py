"""Picture cohomology of windowed subspaces.

Two routes compute (h0, h1, h2):

* ``picture_cohomology`` evaluates the closed forms
  H0 = W cap O1 cap O2, H1 = W cap (O1 + O2) / (W cap O1 + W cap O2) and
  H2 = K / (W + O1 + O2) on the generator echelon form plus tail counts.
* ``complex_cohomology`` builds the three-term complex
  (W cap O2) + (W cap O1) + (O1 cap O2) -> W + O2 + O1 -> K
  as explicit matrices over the box and takes kernel/image dimensions.

Monomials outside the box only meet W through the tail, so their share of
the cohomology is counted in closed form from thresholds and boundary modes.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from kpwindow import defaults
from kpwindow.errors import NotInvertibleError, ValidationError
from kpwindow.linalg import EchelonSpace, rank
from kpwindow.series import (
    INFINITY,
    BiSeriesWindow,
    agrees_with,
    bi_add,
    bi_inverse,
    bi_mul,
    bi_scale,
    dual_lift,
    monomial,
    split_dual,
    zero_series,
)
from kpwindow.subspace import (
    FULL,
    AffineMode,
    EmptyMode,
    Monomial,
    WindowedSubspace,
    fredholm_check,
    membership,
    schur_check,
    threshold_count_negative_gap,
    threshold_count_nonnegative,
)

logger = logging.getLogger(__name__)


class _Unbounded:
    """Marker for a dimension that is infinite (or not bounded by the window)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"

    def __str__(self) -> str:
        return "unbounded-in-window"


UNBOUNDED = _Unbounded()

Dimension = Union[int, _Unbounded]


def _dimension(value) -> Dimension:
    return UNBOUNDED if value == INFINITY else int(value)


def format_dimension(value: Dimension, machine: bool = False):
    if value is UNBOUNDED:
        return "unbounded" if machine else str(UNBOUNDED)
    return value


@dataclass(frozen=True)
class LatticeSubring:
    """Monomials t^n u^a with n >= t_min and a >= u_min (``None``: no condition)."""

    name: str
    t_min: Optional[int] = None
    u_min: Optional[int] = None

    def __contains__(self, m: Monomial) -> bool:
        n, a, _ = m
        if self.t_min is not None and n < self.t_min:
            return False
        if self.u_min is not None and a < self.u_min:
            return False
        return True


O1 = LatticeSubring("O1", t_min=0)
O2 = LatticeSubring("O2", u_min=0)
QUADRANT = LatticeSubring("O1 cap O2", t_min=0, u_min=0)


def in_o1(m: Monomial) -> bool:
    return m in O1


def in_o2(m: Monomial) -> bool:
    return m in O2


def in_quadrant(m: Monomial) -> bool:
    return m in QUADRANT


def in_sum(m: Monomial) -> bool:
    return m in O1 or m in O2


def in_negative(m: Monomial) -> bool:
    """Monomials spanning K / (O1 + O2)."""
    return not in_sum(m)


@dataclass(frozen=True)
class CohomologyReport:
    h0: Dimension
    h1: Dimension
    h2: Dimension
    window_h0: int
    window_h1: int
    window_h2: int
    stable: bool = True
    route: str = "picture"

    @property
    def certified(self) -> bool:
        return UNBOUNDED not in (self.h0, self.h1, self.h2)

    @property
    def dims(self) -> Tuple[Dimension, Dimension, Dimension]:
        return self.h0, self.h1, self.h2

    def to_dict(self) -> dict:
        return {
            "h0": format_dimension(self.h0, machine=True),
            "h1": format_dimension(self.h1, machine=True),
            "h2": format_dimension(self.h2, machine=True),
            "window": {"h0": self.window_h0, "h1": self.window_h1, "h2": self.window_h2},
            "stable": self.stable,
            "certified": self.certified,
            "route": self.route,
        }


def _high_affine_quadrant(mode: AffineMode, start: int):
    """sum over n >= start of #{0 <= a <= slope n + intercept}."""
    s, c = mode.slope, mode.intercept
    if s > 0 or (s == 0 and c >= 0):
        return INFINITY
    total, n = 0, start
    while s * n + c + 1 > 0:
        total += s * n + c + 1
        n += 1
    return total


def _low_affine_gap(mode: AffineMode, stop: int):
    """sum over n < stop of #{slope n + intercept < a < 0}."""
    s, c = mode.slope, mode.intercept
    if s > 0 or (s == 0 and c < -1):
        return INFINITY
    total, n = 0, stop - 1
    while -1 - s * n - c > 0:
        total += -1 - s * n - c
        n -= 1
    return total


def high_levels_quadrant(w: WindowedSubspace):
    """Tail monomials in O1 cap O2 on levels n >= t_hi."""
    total = 0
    for mode in w.tail.high_modes:
        if isinstance(mode, AffineMode):
            total += _high_affine_quadrant(mode, w.box.t_hi)
    return total


def low_levels_gap(w: WindowedSubspace):
    """Monomials outside W + O1 + O2 on levels n < t_lo."""
    total = 0
    for mode in w.tail.low_modes:
        if isinstance(mode, AffineMode):
            total += _low_affine_gap(mode, w.box.t_lo)
        elif isinstance(mode, EmptyMode):
            return INFINITY
    return total


def _box_levels(w: WindowedSubspace, keep: Callable[[int], bool]):
    for n in w.box.levels():
        if keep(n):
            for j in range(w.rank):
                yield n, j


def _picture(w: WindowedSubspace) -> CohomologyReport:
    g = w.generators
    box = w.box
    # tails contribute monomials only, so they split off every intersection
    g_quadrant = g.intersection_dim(in_quadrant)
    tail_quadrant = sum(threshold_count_nonnegative(w.threshold(n, j)) for n, j in _box_levels(w, lambda n: n >= 0))
    tail_quadrant += high_levels_quadrant(w)
    gap = sum(threshold_count_negative_gap(w.threshold(n, j)) for n, j in _box_levels(w, lambda n: n < 0))
    gap += low_levels_gap(w)
    negative_rank = g.restricted_rank(in_negative)

    h0 = g_quadrant + tail_quadrant
    h1 = g.intersection_dim(in_sum) - g.intersection_dim(in_o1) - g.intersection_dim(in_o2) + g_quadrant
    h2 = gap - negative_rank

    box_monomials = box.monomials()
    window_h0 = g_quadrant + sum(1 for m in box_monomials if in_quadrant(m) and w.in_tail(m))
    window_h2 = sum(1 for m in box_monomials if in_negative(m) and not w.in_tail(m)) - negative_rank
    return CohomologyReport(
        _dimension(h0), _dimension(h1), _dimension(h2), window_h0, h1, window_h2, route="picture"
    )


def window_space(w: WindowedSubspace) -> EchelonSpace:
    """W restricted to the box: generators plus the tail monomials of the box."""
    tail = [{m: Fraction(1)} for m in w.tail_monomials()]
    return EchelonSpace(w.generator_vectors() + tail)


def _embed(pieces: Dict[int, Dict[Monomial, Fraction]]) -> Dict[tuple, Fraction]:
    vector = {}
    for copy, piece in pieces.items():
        for m, c in piece.items():
            vector[(copy,) + m] = c
    return vector


def _negated(v: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    return {m: -c for m, c in v.items()}


def _outside_quadrant(w: WindowedSubspace):
    """Tail monomials of O1 cap O2 on box levels above the u-range, plus the high levels."""
    total = 0
    for n, j in _box_levels(w, lambda n: n >= 0):
        d = w.threshold(n, j)
        if d is FULL:
            return INFINITY
        if d is not None:
            total += max(0, d - w.box.u_hi + 1)
    return total + high_levels_quadrant(w)


def _outside_gap(w: WindowedSubspace):
    """Uncovered monomials with a, n < 0 below the u-range, plus the low levels."""
    total = 0
    for n, j in _box_levels(w, lambda n: n < 0):
        d = w.threshold(n, j)
        if d is None:
            return INFINITY
        if d is not FULL:
            total += max(0, w.box.u_lo - 1 - d)
    return total + low_levels_gap(w)


def _complex(w: WindowedSubspace) -> CohomologyReport:
    monomials = w.box.monomials()
    space = window_space(w)
    w_o2 = space.intersect_support(in_o2)
    w_o1 = space.intersect_support(in_o1)
    quadrant = [m for m in monomials if in_quadrant(m)]
    o1 = [m for m in monomials if in_o1(m)]
    o2 = [m for m in monomials if in_o2(m)]

    # (a0, a1, a2) -> (a1 - a0, a2 - a0, a2 - a1)
    d0: List[dict] = []
    d0.extend(_embed({0: _negated(b), 1: _negated(b)}) for b in w_o2.rows)
    d0.extend(_embed({0: b, 2: _negated(b)}) for b in w_o1.rows)
    d0.extend(_embed({1: {m: Fraction(1)}, 2: {m: Fraction(1)}}) for m in quadrant)
    # (a01, a02, a12) -> a01 - a02 + a12
    d1: List[dict] = list(space.rows)
    d1.extend({m: Fraction(-1)} for m in o2)
    d1.extend({m: Fraction(1)} for m in o1)

    c0 = w_o2.dim + w_o1.dim + len(quadrant)
    c1 = space.dim + len(o2) + len(o1)
    rank_d0, rank_d1 = rank(d0), rank(d1)
    logger.debug("complex on %s box monomials: dim C0 %s, dim C1 %s, ranks %s and %s",
                 len(monomials), c0, c1, rank_d0, rank_d1)
    window_h0 = c0 - rank_d0
    window_h1 = c1 - rank_d1 - rank_d0
    window_h2 = len(monomials) - rank_d1
    h0 = window_h0 + _outside_quadrant(w)
    h2 = window_h2 + _outside_gap(w)
    return CohomologyReport(
        _dimension(h0), window_h1, _dimension(h2), window_h0, window_h1, window_h2, route="complex"
    )


def _with_stability(route: Callable[[WindowedSubspace], CohomologyReport], w: WindowedSubspace, margin: int):
    if margin < 0:
        raise ValidationError(f"stability margin must be >= 0, got {margin}", "margin")
    report = route(w)
    if margin == 0:
        return report
    wider = route(w.enlarged(margin))
    stable = wider.dims == report.dims
    if not stable:
        logger.warning(f"{report.route} cohomology changed from {report.dims} to {wider.dims} under margin {margin}")
    return CohomologyReport(
        report.h0, report.h1, report.h2, report.window_h0, report.window_h1, report.window_h2, stable, report.route
    )


def picture_cohomology(w: WindowedSubspace, margin: int = 0) -> CohomologyReport:
    report = _with_stability(_picture, w, margin)
    logger.info(f"picture cohomology (h0, h1, h2) = {tuple(str(d) for d in report.dims)}")
    return report


def complex_cohomology(w: WindowedSubspace, margin: int = 0) -> CohomologyReport:
    report = _with_stability(_complex, w, margin)
    logger.info(f"complex cohomology (h0, h1, h2) = {tuple(str(d) for d in report.dims)}")
    return report


def stability_probe(w: WindowedSubspace, margin: int) -> bool:
    """Both routes give the same dimensions on the box and on the box enlarged by ``margin``."""
    if margin < 0:
        raise ValidationError(f"stability margin must be >= 0, got {margin}", "margin")
    if margin == 0:
        return True
    wider = w.enlarged(margin)
    results = {_picture(w).dims, _complex(w).dims, _picture(wider).dims, _complex(wider).dims}
    return len(results) == 1


def pc_cross_identity(w: WindowedSubspace) -> bool:
    """h1 = dim (W cap (O1 + O2)) / (W cap O1) - dim (W cap O2) / (W cap O1 cap O2).

    Tail monomials cancel between the two quotients, so both are taken on the box.
    """
    h1 = _picture(w).h1
    space = window_space(w)
    lhs = space.intersection_dim(in_sum) - space.intersection_dim(in_o1)
    rhs = space.intersection_dim(in_o2) - space.intersection_dim(in_quadrant)
    logger.debug("cross identity: h1 %s against %s - %s", h1, lhs, rhs)
    return h1 == lhs - rhs


def monomial_count(w: WindowedSubspace, pad: int = 10) -> Tuple[int, int, int]:
    """(h0, h1, h2) of a monomial subspace by counting lattice points.

    Every generator must reduce to a single monomial; the boundary modes must
    keep all dimensions finite. Monomials are enumerated on the box widened by
    ``pad`` in both directions.
    """
    rows = w.generator_vectors()
    if any(len(row) != 1 for row in rows):
        raise ValidationError("lattice counting needs generators that are single monomials", "generators")
    generated = {m for row in rows for m in row}
    box = w.box
    h0 = h2 = 0
    for n in range(box.t_lo - pad, box.t_hi + pad):
        for a in range(box.u_lo - pad, box.u_hi + pad):
            for j in range(w.rank):
                m = (n, a, j)
                inside = m in generated or w.in_tail(m)
                if inside and in_quadrant(m):
                    h0 += 1
                elif not inside and in_negative(m):
                    h2 += 1
    return h0, 0, h2


@dataclass(frozen=True)
class TangentReport:
    pic_kernel_dim: Dimension
    brauer_dim: Dimension
    representable: bool

    def to_dict(self) -> dict:
        return {
            "pic_kernel_dim": format_dimension(self.pic_kernel_dim, machine=True),
            "brauer_dim": format_dimension(self.brauer_dim, machine=True),
            "representable": self.representable,
        }


def tangent_report(a: WindowedSubspace, margin: int = defaults.MARGIN) -> TangentReport:
    """Kernel and Brauer tangent dimensions of a rank-one Fredholm algebra."""
    if a.rank != 1:
        raise ValidationError(f"tangent reports need a rank-one algebra, got rank {a.rank}")
    if not fredholm_check(a).verdict:
        raise ValidationError("the algebra is not a generalized Fredholm subspace")
    closed = schur_check(a, a, margin, require_algebra=False)
    if not closed.ok:
        raise ValidationError(f"the subspace is not closed under multiplication: {closed.witness}")
    report = _picture(a)
    return TangentReport(report.h1, report.h2, report.h1 == 0)


def split_unit(a: BiSeriesWindow, t_cap: int, u_cap: int) -> Tuple[BiSeriesWindow, BiSeriesWindow]:
    """a = a0 (1 + eps b) for a series with dual coefficients; b is exact on t < t_cap, u < u_cap."""
    value, infinitesimal = split_dual(a)
    if not value.terms:
        raise NotInvertibleError("the value part vanishes, so the series is not a unit")
    if not infinitesimal.terms:
        return value, zero_series()
    t_shift = min(n for n, _ in infinitesimal.terms)
    u_shift = min(e for _, e in infinitesimal.terms)
    inverse = bi_inverse(value, t_cap=t_cap - t_shift, u_cap=u_cap - u_shift)
    return value, bi_mul(infinitesimal, inverse)


def random_unit(rng: random.Random) -> BiSeriesWindow:
    n, a = rng.randint(-1, 1), rng.randint(-1, 1)
    terms = {(n, a): Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))}
    for _ in range(rng.randint(0, 2)):
        dn = rng.randint(0, 1)
        da = rng.randint(1, 2) if dn == 0 else rng.randint(-1, 2)
        terms[(n + dn, a + da)] = Fraction(rng.randint(-2, 2))
    return BiSeriesWindow(terms)


def _random_member(a: WindowedSubspace, rng: random.Random) -> BiSeriesWindow:
    basis = a.generator_vectors() + [{m: Fraction(1)} for m in a.tail_monomials()]
    picked = rng.sample(basis, min(len(basis), rng.randint(0, 3)))
    terms: Dict[Tuple[int, int], Fraction] = {}
    for vector in picked:
        weight = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        for (n, e, _), c in vector.items():
            terms[(n, e)] = terms.get((n, e), Fraction(0)) + weight * c
    return BiSeriesWindow(terms)


def _exp_minus_linear(x: BiSeriesWindow) -> BiSeriesWindow:
    """(1 + x + x^2/2) - (1 + x), zero when x^2 = 0."""
    return bi_scale(bi_mul(x, x), Fraction(1, 2))


def _log_minus_linear(x: BiSeriesWindow) -> BiSeriesWindow:
    """log(1 + x) - x to third order."""
    square = bi_mul(x, x)
    return bi_add(bi_scale(square, Fraction(-1, 2)), bi_scale(bi_mul(square, x), Fraction(1, 3)))


def dual_number_splitting(a: WindowedSubspace, samples: int = 50, seed: int = 0) -> bool:
    """Units over k[eps] factor uniquely as a0 (1 + eps b) with b in A."""
    if a.rank != 1:
        raise ValidationError(f"dual-number splitting needs a rank-one algebra, got rank {a.rank}")
    rng = random.Random(seed)
    box = a.box
    one = monomial(0, 0)
    for sample in range(samples):
        a0 = random_unit(rng)
        b = _random_member(a, rng)
        lifted = dual_lift(a0, bi_mul(a0, b))
        value, recovered = split_unit(lifted, box.t_hi, box.u_hi)
        eps_b = dual_lift(zero_series(), b)
        checks = {
            "value part": value.terms == a0.terms,
            "recovered b": agrees_with(recovered, b) and all(
                recovered.terms.get(p, 0) == c for p, c in b.terms.items()
            ),
            "b in A": membership(a, recovered),
            "eps square": not bi_mul(eps_b, eps_b).terms,
            "product": bi_mul(a0, bi_add(one, eps_b)).terms == lifted.terms,
            "exp": not _exp_minus_linear(eps_b).terms,
            "log": not _log_minus_linear(eps_b).terms,
        }
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            logger.warning(f"dual-number splitting failed on sample {sample}: {', '.join(failed)}")
            return False
    logger.info(f"dual-number splitting verified on {samples} samples")
    return True
