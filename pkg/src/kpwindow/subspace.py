"""Finitely described subspaces W of k((u))((t))^r.

W = span(generators) + T, where the generators are exact vectors supported
in a finite ``MonomialBox`` and T is the tail: on level t^n, component j,
every monomial u^a with a <= d_j(n). Thresholds inside the box are listed per
level; outside it they follow the component's boundary modes.

Monomials are triples ``(n, a, j)`` for t^n u^a e_j, ordered by t-exponent,
then u-exponent, then component. Generators are reduced against the tail and
kept in reduced row-echelon form, so the pivot of a row is its leading term.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from kpwindow import defaults
from kpwindow.coefficients import DualNumber
from kpwindow.errors import (
    IndeterminateError,
    NotInvertibleError,
    PrecisionError,
    ValidationError,
)
from kpwindow.linalg import EchelonSpace
from kpwindow.series import INFINITY, BiSeriesWindow, bi_inverse, bi_mul, leading_term, t_order

logger = logging.getLogger(__name__)

Monomial = Tuple[int, int, int]
Vector = Dict[Monomial, Fraction]


class _Full:
    """Threshold of a level that contains every u-exponent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FULL"


FULL = _Full()

Threshold = Union[int, None, _Full]


@dataclass(frozen=True)
class EmptyMode:
    def threshold(self, n: int) -> Threshold:
        return None

    def __str__(self) -> str:
        return "empty"


@dataclass(frozen=True)
class FullMode:
    def threshold(self, n: int) -> Threshold:
        return FULL

    def __str__(self) -> str:
        return "full"


@dataclass(frozen=True)
class AffineMode:
    slope: int
    intercept: int

    def threshold(self, n: int) -> Threshold:
        return self.slope * n + self.intercept

    def __str__(self) -> str:
        return f"affine({self.slope}, {self.intercept})"


Empty = EmptyMode()
Full = FullMode()
BoundaryMode = Union[EmptyMode, FullMode, AffineMode]


@dataclass(frozen=True)
class MonomialBox:
    """[t_lo, t_hi) x [u_lo, u_hi) on each of ``rank`` components."""

    t_lo: int
    t_hi: int
    u_lo: int
    u_hi: int
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(f"rank must be >= 1, got {self.rank}")
        if self.t_lo > -1 or self.t_hi < 1:
            raise ValidationError(f"t-range [{self.t_lo}, {self.t_hi}) must contain [-1, 1)")
        if self.u_lo > -1 or self.u_hi < 1:
            raise ValidationError(f"u-range [{self.u_lo}, {self.u_hi}) must contain [-1, 1)")

    def levels(self) -> range:
        return range(self.t_lo, self.t_hi)

    def contains(self, m: Monomial) -> bool:
        n, a, j = m
        return self.t_lo <= n < self.t_hi and self.u_lo <= a < self.u_hi and 0 <= j < self.rank

    def monomials(self) -> List[Monomial]:
        return [
            (n, a, j)
            for n in range(self.t_lo, self.t_hi)
            for a in range(self.u_lo, self.u_hi)
            for j in range(self.rank)
        ]

    @property
    def size(self) -> int:
        return self.rank * (self.t_hi - self.t_lo) * (self.u_hi - self.u_lo)

    def enlarged(self, margin: int) -> "MonomialBox":
        return MonomialBox(self.t_lo - margin, self.t_hi + margin, self.u_lo - margin, self.u_hi + margin, self.rank)


@dataclass(frozen=True)
class TailProfile:
    """Per-component thresholds on the box levels plus boundary modes."""

    thresholds: Tuple[Mapping[int, Threshold], ...]
    low_modes: Tuple[BoundaryMode, ...]
    high_modes: Tuple[BoundaryMode, ...]

    def threshold(self, box: MonomialBox, n: int, j: int) -> Threshold:
        if n < box.t_lo:
            return self.low_modes[j].threshold(n)
        if n >= box.t_hi:
            return self.high_modes[j].threshold(n)
        return self.thresholds[j].get(n)

    def covers(self, box: MonomialBox, m: Monomial) -> bool:
        n, a, j = m
        d = self.threshold(box, n, j)
        if d is None:
            return False
        if d is FULL:
            return True
        return a <= d


def threshold_count_nonnegative(d: Threshold):
    """#{a >= 0 : a <= d}."""
    if d is None:
        return 0
    if d is FULL:
        return INFINITY
    return max(0, d + 1)


def threshold_count_negative_gap(d: Threshold):
    """#{a < 0 : a > d}, the negative exponents the tail misses."""
    if d is None:
        return INFINITY
    if d is FULL:
        return 0
    return max(0, -1 - d)


def vector_of(value, rank: int = 1, path: str = "vector") -> Vector:
    """Normalize a BiSeriesWindow, a sequence of them or a monomial dict into an exact vector."""
    if isinstance(value, BiSeriesWindow):
        value = (value,)
    if isinstance(value, Mapping):
        vector = {}
        for (n, a, j), c in value.items():
            if not 0 <= j < rank:
                raise ValidationError(f"component {j} outside 0..{rank - 1}", path)
            c = _rational(c, path)
            if c:
                vector[(int(n), int(a), int(j))] = c
        return vector
    components = list(value)
    if len(components) != rank:
        raise ValidationError(f"expected {rank} components, got {len(components)}", path)
    vector = {}
    for j, series in enumerate(components):
        if not series.is_exact:
            raise ValidationError("generators must be exact series", f"{path}[{j}]")
        for (n, a), c in series.terms.items():
            c = _rational(c, path)
            if c:
                vector[(n, a, j)] = c
    return vector


def _rational(c, path: str) -> Fraction:
    if isinstance(c, DualNumber):
        if c.infinitesimal:
            raise ValidationError("subspaces are defined over the rationals, got a dual coefficient", path)
        return c.value
    return Fraction(c)


class WindowedSubspace:
    """W = span(generators) + tail, immutable after construction."""

    def __init__(
        self,
        box: MonomialBox,
        generators: Iterable = (),
        thresholds: Optional[Sequence[Mapping[int, Threshold]]] = None,
        low_modes: Union[BoundaryMode, Sequence[BoundaryMode]] = Empty,
        high_modes: Union[BoundaryMode, Sequence[BoundaryMode]] = Empty,
    ):
        self.box = box
        rank = box.rank
        if thresholds is None:
            thresholds = [{} for _ in range(rank)]
        if len(thresholds) != rank:
            raise ValidationError(f"expected thresholds for {rank} components, got {len(thresholds)}")
        low_modes = self._modes(low_modes, rank, "low_modes")
        high_modes = self._modes(high_modes, rank, "high_modes")
        if any(isinstance(mode, FullMode) for mode in high_modes):
            raise ValidationError("the high boundary mode must be empty or affine", "high_modes")
        checked = []
        for j, per_level in enumerate(thresholds):
            levels = {}
            for n, d in per_level.items():
                if not box.t_lo <= n < box.t_hi:
                    raise ValidationError(f"threshold for level {n} lies outside the box", f"thresholds[{j}]")
                if not (d is None or d is FULL or isinstance(d, int)):
                    raise ValidationError(f"threshold must be an integer, none or full, got {d!r}", f"thresholds[{j}]")
                if d is not None:
                    levels[int(n)] = d
            checked.append(levels)
        self.tail = TailProfile(tuple(checked), low_modes, high_modes)

        reduced = []
        for k, generator in enumerate(generators):
            vector = vector_of(generator, rank, f"generators[{k}]")
            for m in vector:
                if not box.contains(m):
                    raise ValidationError(f"generator monomial {m} lies outside the box", f"generators[{k}]")
            reduced.append({m: c for m, c in vector.items() if not self.tail.covers(box, m)})
        self.generators = EchelonSpace(reduced)
        logger.debug("subspace with %s generators after tail reduction", self.generators.dim)

    @staticmethod
    def _modes(modes, rank: int, path: str) -> Tuple[BoundaryMode, ...]:
        if isinstance(modes, (EmptyMode, FullMode, AffineMode)):
            return (modes,) * rank
        modes = tuple(modes)
        if len(modes) != rank:
            raise ValidationError(f"expected {rank} modes, got {len(modes)}", path)
        return modes

    @property
    def rank(self) -> int:
        return self.box.rank

    def threshold(self, n: int, j: int) -> Threshold:
        return self.tail.threshold(self.box, n, j)

    def in_tail(self, m: Monomial) -> bool:
        return self.tail.covers(self.box, m)

    def generator_vectors(self) -> List[Vector]:
        return [dict(row) for row in self.generators.rows]

    def tail_monomials(self, box: Optional[MonomialBox] = None) -> List[Monomial]:
        """Tail monomials inside ``box`` (default: the subspace's own box)."""
        box = box or self.box
        return [m for m in box.monomials() if self.in_tail(m)]

    def with_box(self, box: MonomialBox) -> "WindowedSubspace":
        """The same subspace described on another box containing the generators."""
        thresholds = [
            {n: self.threshold(n, j) for n in box.levels() if self.threshold(n, j) is not None}
            for j in range(self.rank)
        ]
        return WindowedSubspace(
            box, self.generator_vectors(), thresholds, self.tail.low_modes, self.tail.high_modes
        )

    def enlarged(self, margin: int) -> "WindowedSubspace":
        return self.with_box(self.box.enlarged(margin))

    def __repr__(self) -> str:
        return f"WindowedSubspace(box={self.box}, generators={self.generators.dim})"


def shifted(w: WindowedSubspace, p: int, q: int) -> WindowedSubspace:
    """u^p t^q . W on a box containing the shifted box and the origin region."""
    old = w.box
    box = MonomialBox(
        min(old.t_lo + q, -1), max(old.t_hi + q, 1), min(old.u_lo + p, -1), max(old.u_hi + p, 1), old.rank
    )

    def moved(d: Threshold) -> Threshold:
        return d + p if isinstance(d, int) else d

    def moved_mode(mode: BoundaryMode) -> BoundaryMode:
        if isinstance(mode, AffineMode):
            return AffineMode(mode.slope, mode.intercept - mode.slope * q + p)
        return mode

    thresholds = []
    for j in range(old.rank):
        levels = {}
        for n in box.levels():
            d = moved(w.threshold(n - q, j))
            if d is not None:
                levels[n] = d
        thresholds.append(levels)
    generators = [{(n + q, a + p, j): c for (n, a, j), c in g.items()} for g in w.generator_vectors()]
    low = tuple(moved_mode(mode) for mode in w.tail.low_modes)
    high = tuple(moved_mode(mode) for mode in w.tail.high_modes)
    return WindowedSubspace(box, generators, thresholds, low, high)


def permuted(w: WindowedSubspace, perm: Sequence[int]) -> WindowedSubspace:
    """Relabel components: component j of W becomes component perm[j]."""
    if sorted(perm) != list(range(w.rank)):
        raise ValidationError(f"{list(perm)} is not a permutation of 0..{w.rank - 1}")
    thresholds: List[Mapping[int, Threshold]] = [{} for _ in range(w.rank)]
    low: List[BoundaryMode] = [Empty] * w.rank
    high: List[BoundaryMode] = [Empty] * w.rank
    for j, target in enumerate(perm):
        thresholds[target] = dict(w.tail.thresholds[j])
        low[target] = w.tail.low_modes[j]
        high[target] = w.tail.high_modes[j]
    generators = [{(n, a, perm[j]): c for (n, a, j), c in g.items()} for g in w.generator_vectors()]
    return WindowedSubspace(w.box, generators, thresholds, tuple(low), tuple(high))


def _unknown_region_meets_box(series: BiSeriesWindow, box: MonomialBox) -> bool:
    if series.is_exact:
        return False
    if series.t_cap is not None and series.t_cap < box.t_hi:
        return True
    for n in box.levels():
        if series.t_floor is not None and n < series.t_floor:
            continue
        if series.u_cap(n) < box.u_hi:
            return True
    return False


def membership(w: WindowedSubspace, v) -> bool:
    """Is v in W? Exact vectors are always decided; windowed ones only on their known part
    when the unknown region stays outside the box."""
    if isinstance(v, BiSeriesWindow):
        v = (v,)
    if not isinstance(v, Mapping):
        components = list(v)
        if len(components) != w.rank:
            raise ValidationError(f"expected {w.rank} components, got {len(components)}")
        for j, series in enumerate(components):
            if _unknown_region_meets_box(series, w.box):
                raise IndeterminateError(f"component {j} is truncated inside the box; membership is undecidable")
        vector: Vector = {}
        for j, series in enumerate(components):
            for (n, a), c in series.terms.items():
                c = _rational(c, f"component {j}")
                if c:
                    vector[(n, a, j)] = c
    else:
        vector = vector_of(v, w.rank)
    residual = {m: c for m, c in vector.items() if not w.in_tail(m)}
    return w.generators.contains(residual)


@dataclass(frozen=True)
class SliceSpace:
    """W(n): the tail part on level n plus the level-n leading parts of generators."""

    level: int
    thresholds: Tuple[Threshold, ...]
    leading: EchelonSpace
    analytic: bool = False

    @property
    def generator_dim(self) -> int:
        return self.leading.dim

    def contains_monomial(self, a: int, j: int) -> bool:
        d = self.thresholds[j]
        if d is FULL or (d is not None and a <= d):
            return True
        return self.leading.contains({(a, j): Fraction(1)})


def level_slice(w: WindowedSubspace, n: int) -> SliceSpace:
    """W(n) = (W cap t^n O1) / (W cap t^(n+1) O1), columns (a, j)."""
    thresholds = tuple(w.threshold(n, j) for j in range(w.rank))
    if not w.box.t_lo <= n < w.box.t_hi:
        return SliceSpace(n, thresholds, EchelonSpace(), analytic=True)
    rows = []
    for pivot, row in zip(w.generators.pivots, w.generators.rows):
        if pivot[0] == n:
            rows.append({(a, j): c for (m, a, j), c in row.items() if m == n})
    return SliceSpace(n, thresholds, EchelonSpace(rows))


@dataclass(frozen=True)
class LevelReport:
    level: int
    h0: Union[int, float]
    h1: Union[int, float]
    analytic: bool = False

    @property
    def fredholm(self) -> bool:
        return self.h0 != INFINITY and self.h1 != INFINITY


@dataclass(frozen=True)
class FredholmReport:
    levels: Tuple[LevelReport, ...]
    low: Tuple[LevelReport, ...]
    high: Tuple[LevelReport, ...]

    @property
    def verdict(self) -> bool:
        return all(report.fredholm for report in self.levels + self.low + self.high)


def level_dims(w: WindowedSubspace, n: int) -> LevelReport:
    """(dim W(n) cap k[[u]]^r, codim of W(n) + k[[u]]^r)."""
    piece = level_slice(w, n)
    h0 = sum(threshold_count_nonnegative(d) for d in piece.thresholds)
    h1 = sum(threshold_count_negative_gap(d) for d in piece.thresholds)
    leading = piece.leading
    h0 += leading.intersection_dim(lambda key: key[0] >= 0)
    h1 -= leading.restricted_rank(lambda key: key[0] < 0)
    return LevelReport(n, h0, h1, analytic=piece.analytic)


def explicit_level_dims(w: WindowedSubspace, n: int, pad: int = 3) -> Optional[Tuple[int, int]]:
    """Level-n dimensions from one echelon space of generators and tail monomials.

    The u-range is the box widened by ``pad``. Returns None when a threshold on
    level n is not an integer inside that range.
    """
    box = w.box
    for j in range(w.rank):
        d = w.threshold(n, j)
        if not isinstance(d, int) or not box.u_lo - pad <= d < box.u_hi + pad:
            return None
    region = MonomialBox(box.t_lo, box.t_hi, box.u_lo - pad, box.u_hi + pad, box.rank)
    space = EchelonSpace(w.generator_vectors() + [{m: Fraction(1)} for m in w.tail_monomials(region)])
    above = space.intersect_support(lambda k: k[0] > n)
    nonnegative = space.intersect_support(lambda k: k[0] > n or (k[0] == n and k[1] >= 0))
    at_least = space.intersect_support(lambda k: k[0] >= n)
    h0 = nonnegative.dim - above.dim
    h1 = box.rank * (pad - box.u_lo) - at_least.restricted_rank(lambda k: k[0] == n and k[1] < 0)
    return h0, h1


def _mode_report(w: WindowedSubspace, high: bool) -> Tuple[LevelReport, ...]:
    """The boundary levels as a whole: one representative per component mode."""
    modes = w.tail.high_modes if high else w.tail.low_modes
    level = w.box.t_hi if high else w.box.t_lo - 1
    reports = []
    for j, mode in enumerate(modes):
        if isinstance(mode, AffineMode):
            d = mode.threshold(level)
            reports.append(LevelReport(level, threshold_count_nonnegative(d), threshold_count_negative_gap(d), True))
        elif isinstance(mode, FullMode):
            reports.append(LevelReport(level, INFINITY, 0, True))
        else:
            reports.append(LevelReport(level, 0, INFINITY, True))
    return tuple(reports)


def fredholm_check(w: WindowedSubspace) -> FredholmReport:
    levels = tuple(level_dims(w, n) for n in w.box.levels())
    report = FredholmReport(levels, _mode_report(w, high=False), _mode_report(w, high=True))
    logger.info(f"fredholm check over levels [{w.box.t_lo}, {w.box.t_hi}): verdict {report.verdict}")
    return report


def multiply(a: Vector, w: Vector) -> Vector:
    """Scalar-series times vector: a lives on component 0."""
    product: Vector = {}
    for (n, x, _), c in a.items():
        for (m, y, j), d in w.items():
            key = (n + m, x + y, j)
            product[key] = product.get(key, Fraction(0)) + c * d
    return {k: c for k, c in product.items() if c}


def _representatives(w: WindowedSubspace, margin: int) -> List[Vector]:
    reps = w.generator_vectors()
    reps.extend({m: Fraction(1)} for m in w.tail_monomials(w.box.enlarged(margin)))
    return reps


@dataclass(frozen=True)
class SchurResult:
    ok: bool
    witness: Optional[Tuple[Vector, Vector]] = None
    checked: int = 0


def _closure(a: WindowedSubspace, w: WindowedSubspace, margin: int) -> SchurResult:
    checked = 0
    for x in _representatives(a, margin):
        for y in _representatives(w, margin):
            checked += 1
            if not membership(w, multiply(x, y)):
                return SchurResult(False, (x, y), checked)
    return SchurResult(True, None, checked)


def schur_check(a: WindowedSubspace, w: WindowedSubspace, margin: int = defaults.MARGIN, require_algebra: bool = True) -> SchurResult:
    """A.W in W over generators and tail monomials in the box enlarged by ``margin``."""
    if a.rank != 1:
        raise ValidationError(f"the multiplier subspace must have rank 1, got {a.rank}")
    if require_algebra:
        closed = _closure(a, a, margin)
        if not closed.ok:
            raise ValidationError(f"A is not closed under multiplication: {closed.witness}")
    result = _closure(a, w, margin)
    logger.info(f"schur check: {'pair' if result.ok else 'not a pair'} after {result.checked} products")
    return result


def condition_star_star(a: WindowedSubspace, candidate: BiSeriesWindow) -> bool:
    """candidate in A_1 with inverse in A_-1: in A, t-order 1, inverse in A."""
    if candidate.is_exact_zero:
        return False
    try:
        if t_order(candidate) != 1:
            return False
        box = a.box
        inverse = bi_inverse(candidate, t_cap=box.t_hi, u_cap=box.u_hi)
    except (NotInvertibleError, PrecisionError) as exc:
        logger.debug("candidate rejected: %s", exc)
        return False
    return membership(a, candidate) and membership(a, inverse)


def _require_unit(x: BiSeriesWindow, name: str) -> None:
    if x.is_exact_zero:
        raise NotInvertibleError(f"{name} is zero, not a unit")
    _, _, lead = leading_term(x)
    if isinstance(lead, DualNumber) and not lead.is_unit():
        raise NotInvertibleError(f"{name} has a nilpotent leading coefficient")


def ord_unit(a: BiSeriesWindow, b: BiSeriesWindow) -> Tuple[int, int, int]:
    """(ord a, ord b, ord ab) for the t-adic filtration."""
    _require_unit(a, "a")
    _require_unit(b, "b")
    return t_order(a), t_order(b), t_order(bi_mul(a, b))


def in_order_kernel(a: BiSeriesWindow, t_cap: int = defaults.T_CAP, u_cap: int = defaults.U_CAP) -> bool:
    """a and a^-1 both lie in k((u))[[t]] (checked on the known window)."""
    _require_unit(a, "a")
    inverse = bi_inverse(a, t_cap=t_cap, u_cap=u_cap)
    return _non_negative(a) and _non_negative(inverse)


def _non_negative(x: BiSeriesWindow) -> bool:
    levels = list(x.levels())
    return not levels or levels[0] >= 0
