"""KP and Parshin hierarchies.

The KP part works in the differential polynomial ring Q{a_1, a_2, ...}: the
generic Lax operator L = d + a_1 d^-1 + ... + a_D d^-D is composed symbolically
and every flow d/dt_n a_i is read off from [(L^n)_+, L] as a differential
polynomial. The Parshin part builds E = Q[[x1, x2]]((d1^-1))((d2^-1)) as a
nested operator ring, dresses operators and lets E act on k((u))((t)) through
the quotient by the left ideal E.(x1, x2).
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement, ring as poly_ring

from kpwindow import defaults
from kpwindow.coefficients import DualNumber, format_rational, parse_rational
from kpwindow.errors import NotInvertibleError, PrecisionError, PropertyCheckError, ValidationError
from kpwindow.psdo import (
    OperatorRing,
    OperatorWindow,
    binomial,
    commutator,
    compose,
    monic_inverse,
    power,
    split,
)
from kpwindow.series import INFINITY, BiSeriesWindow, PowerSeriesRing, TruncatedPowerSeries, monomial

logger = logging.getLogger(__name__)

KDV_PRINTED_COEFFICIENT = Fraction(7)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class DiffPolynomialRing:
    """Q{a_1..a_depth} truncated at derivative order ``order_cap``."""

    def __init__(self, depth: int, order_cap: Optional[int] = None):
        if depth < 1:
            raise ValidationError(f"depth must be >= 1, got {depth}")
        self.depth = depth
        self.order_cap = order_cap if order_cap is not None else 2 * depth + 6
        names = [f"a{i}_{m}" for i in range(1, depth + 1) for m in range(self.order_cap + 1)]
        self.ring = poly_ring(names, QQ)[0]
        self.gens = self.ring.gens

    def __repr__(self) -> str:
        return f"DiffPolynomialRing(depth={self.depth}, order_cap={self.order_cap})"

    def index(self, i: int, m: int = 0) -> int:
        if not 1 <= i <= self.depth:
            raise PrecisionError(f"a_{i} is not retained at depth {self.depth}")
        if not 0 <= m <= self.order_cap:
            raise PrecisionError(f"derivative order {m} of a_{i} exceeds the order cap {self.order_cap}")
        return (i - 1) * (self.order_cap + 1) + m

    def coordinates(self, index: int) -> Tuple[int, int]:
        i, m = divmod(index, self.order_cap + 1)
        return i + 1, m

    def a(self, i: int, m: int = 0) -> PolyElement:
        return self.gens[self.index(i, m)]

    def zero(self) -> PolyElement:
        return self.ring.zero

    def one(self) -> PolyElement:
        return self.ring.one

    def scalar(self, c) -> PolyElement:
        c = Fraction(c)
        return self.ring.ground_new(QQ(c.numerator, c.denominator))

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def derive(self, p: PolyElement) -> PolyElement:
        """The total derivative: a_i^(m) -> a_i^(m+1), extended by Leibniz."""
        result: Dict[Tuple[int, ...], object] = {}
        for monom, coeff in p.terms():
            for idx, e in enumerate(monom):
                if not e:
                    continue
                i, m = self.coordinates(idx)
                target = self.index(i, m + 1)
                shifted = list(monom)
                shifted[idx] -= 1
                shifted[target] += 1
                key = tuple(shifted)
                result[key] = result.get(key, QQ(0)) + coeff * e
        return self.ring.from_dict({k: v for k, v in result.items() if v})

    def derive_n(self, p: PolyElement, m: int) -> PolyElement:
        for _ in range(m):
            p = self.derive(p)
        return p

    def is_exact_zero(self, p) -> bool:
        return not p

    def vanishes(self, p) -> bool:
        return not p

    def is_one(self, p) -> bool:
        return p == self.ring.one

    def is_exhausted(self, p) -> bool:
        return False

    def variables_of(self, p: PolyElement) -> List[Tuple[int, int]]:
        degrees = p.degrees()
        return [self.coordinates(idx) for idx, d in enumerate(degrees) if d > 0]

    def substitute(self, p: PolyElement, values: Mapping[int, PolyElement]) -> PolyElement:
        """Replace a_i by values[i] (and a_i^(m) by its m-th derivative)."""
        pairs = []
        for i, m in self.variables_of(p):
            if i in values:
                pairs.append((self.a(i, m), self.derive_n(values[i], m)))
        if not pairs:
            return p
        return p.compose(pairs)

    def to_descriptor(self, p: PolyElement) -> list:
        """[[[i, m, power], ...], "p/q"] pairs in a stable order."""
        rows = []
        for monom, coeff in p.terms():
            factors = []
            for idx, e in enumerate(monom):
                if e:
                    i, m = self.coordinates(idx)
                    factors.append([i, m, int(e)])
            rows.append([factors, format_rational(_to_fraction(coeff))])
        rows.sort(key=lambda row: (row[0], row[1]))
        return rows

    def from_descriptor(self, rows: list, path: str = "polynomial") -> PolyElement:
        if not isinstance(rows, list):
            raise ValidationError("expected a list of [monomial, scalar] pairs", path)
        result = self.ring.zero
        for k, row in enumerate(rows):
            where = f"{path}[{k}]"
            if not isinstance(row, list) or len(row) != 2 or not isinstance(row[0], list):
                raise ValidationError("expected [[[i, m, power], ...], scalar]", where)
            term = self.scalar(parse_rational(row[1], f"{where}[1]"))
            for factor in row[0]:
                if not isinstance(factor, list) or len(factor) != 3 or not all(isinstance(v, int) for v in factor):
                    raise ValidationError("monomial factors are [i, m, power] integer triples", f"{where}[0]")
                i, m, e = factor
                if e < 0:
                    raise ValidationError("negative power in a differential polynomial", f"{where}[0]")
                term = term * self.a(i, m) ** e
            result += term
        return result


class EvolutionaryDerivation:
    """D(a_i) given for the retained i; D(a_i^(m)) = d^m D(a_i)."""

    def __init__(self, ring: DiffPolynomialRing, images: Mapping[int, PolyElement]):
        self.ring = ring
        self.images = dict(images)
        self._cache: Dict[Tuple[int, int], PolyElement] = {}

    def image(self, i: int, m: int = 0) -> PolyElement:
        if i not in self.images:
            raise PrecisionError(f"the flow of a_{i} is not determined at depth {self.ring.depth}")
        key = (i, m)
        if key not in self._cache:
            self._cache[key] = self.ring.derive_n(self.images[i], m)
        return self._cache[key]

    def apply(self, p: PolyElement) -> PolyElement:
        result = self.ring.zero()
        for i, m in self.ring.variables_of(p):
            result += p.diff(self.ring.a(i, m)) * self.image(i, m)
        return result

    def __call__(self, p: PolyElement) -> PolyElement:
        return self.apply(p)


def generic_lax(ring: DiffPolynomialRing) -> Tuple[OperatorRing, OperatorWindow]:
    """L = d + a_1 d^-1 + ... + a_D d^-D, unknown below d^-D."""
    operators = OperatorRing(ring, default_floor=-ring.depth)
    coefficients = {1: ring.one()}
    for i in range(1, ring.depth + 1):
        coefficients[-i] = ring.a(i)
    return operators, operators.make(coefficients, -ring.depth)


def kp_flow(n: int, depth: int, ring: Optional[DiffPolynomialRing] = None) -> EvolutionaryDerivation:
    """The t_n flow d a_i / d t_n = coefficient of d^-i in [(L^n)_+, L], for i <= depth - n."""
    if n < 1:
        raise ValidationError(f"flow index must be >= 1, got {n}")
    ring = ring or DiffPolynomialRing(depth)
    if depth - n < 1:
        raise PrecisionError(f"depth {depth} determines no coefficient of the t_{n} flow")
    operators, lax = generic_lax(ring)
    plus, _ = split(power(operators, lax, n))
    if not plus.is_exact:
        raise PrecisionError(f"(L^{n})_+ is not determined at depth {depth}")
    rhs = commutator(operators, plus, lax)
    images = {}
    for i in range(1, depth - n + 1):
        if rhs.floor is not None and -i < rhs.floor:
            raise PrecisionError(f"coefficient of d^-{i} in the t_{n} flow is below the floor {rhs.floor}")
        images[i] = rhs.coefficients.get(-i, ring.zero())
    logger.debug("t_%s flow at depth %s determines a_1..a_%s", n, depth, depth - n)
    return EvolutionaryDerivation(ring, images)


def flows_commute(n: int, m: int, depth: int) -> bool:
    """D_n D_m a_1 == D_m D_n a_1 as differential polynomials."""
    ring = DiffPolynomialRing(depth)
    d_n = kp_flow(n, depth, ring)
    d_m = kp_flow(m, depth, ring)
    a1 = ring.a(1)
    return d_n(d_m(a1)) == d_m(d_n(a1))


def random_lax(rng: random.Random, depth: int, floor: int = defaults.FLOOR) -> Tuple[OperatorRing, OperatorWindow]:
    """L = d + sum_i a_i(x) d^-i over Q[[x]] with small random polynomial a_i."""
    operators = OperatorRing(PowerSeriesRing(1), default_floor=floor)
    scalars = operators.base
    coefficients = {1: scalars.one()}
    for i in range(1, depth + 1):
        terms = {(k,): Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for k in range(rng.randint(0, 3))}
        coefficients[-i] = scalars.element(terms)
    return operators, operators.make(coefficients)


def flow_well_posed(operators: OperatorRing, lax: OperatorWindow, n: int) -> bool:
    """[(L^n)_+, L] has no part of non-negative degree."""
    plus, _ = split(power(operators, lax, n))
    bracket_plus, _ = split(commutator(operators, plus, lax))
    return operators.vanishes(bracket_plus)


@dataclass
class KpDerivation:
    residual: PolyElement
    depth: int
    ring: DiffPolynomialRing
    rhs_coefficient: Fraction

    @property
    def vanishes(self) -> bool:
        return not self.residual


def derive_kp(rhs_coefficient=Fraction(3), depth_cap: int = defaults.DEPTH_CAP, start_depth: int = 3) -> KpDerivation:
    """Residual of (4u_t - u''' - 12uu')' - c u_yy with u = a_1, y = t_2, t = t_3.

    Depth is raised from ``start_depth`` until both flows determine every
    coefficient the expression needs.
    """
    rhs_coefficient = Fraction(rhs_coefficient)
    for depth in range(start_depth, depth_cap + 1):
        ring = DiffPolynomialRing(depth)
        try:
            d2 = kp_flow(2, depth, ring)
            d3 = kp_flow(3, depth, ring)
            u = ring.a(1)
            u_x, u_xxx = ring.a(1, 1), ring.a(1, 3)
            u_t = d3(u)
            u_yy = d2(d2(u))
            inner = ring.scalar(4) * u_t - u_xxx - ring.scalar(12) * u * u_x
            residual = ring.derive(inner) - ring.scalar(rhs_coefficient) * u_yy
        except PrecisionError as exc:
            logger.debug("depth %s insufficient: %s", depth, exc)
            continue
        logger.info(f"KP residual computed at depth {depth}: {'zero' if not residual else 'nonzero'}")
        return KpDerivation(residual, depth, ring, rhs_coefficient)
    raise PrecisionError(f"no depth up to {depth_cap} determines the KP residual")


@dataclass
class KdvReport:
    coefficient: Fraction
    evolution: PolyElement
    depth: int
    ring: DiffPolynomialRing
    even_flow_vanishes: bool
    printed_coefficient: Fraction = KDV_PRINTED_COEFFICIENT
    check_depth: Optional[int] = None
    check_coefficient: Optional[Fraction] = None

    @property
    def matches_printed(self) -> bool:
        return self.coefficient == self.printed_coefficient

    @property
    def consistent(self) -> bool:
        return self.check_coefficient is None or self.check_coefficient == self.coefficient


def reduction_solution(ring: DiffPolynomialRing) -> Dict[int, PolyElement]:
    """Solve (L^2)_- = 0 for a_2, a_3, ... in terms of u = a_1.

    The coefficient of d^-k in L^2 is 2 a_{k+1} plus terms in a_1..a_k.
    """
    operators, lax = generic_lax(ring)
    square = compose(operators, lax, lax)
    solution = {1: ring.a(1)}
    for k in range(1, ring.depth):
        if square.floor is not None and -k < square.floor:
            break
        coefficient = square.coefficients.get(-k, ring.zero())
        rest = coefficient - ring.scalar(2) * ring.a(k + 1)
        rest = ring.substitute(rest, solution)
        solution[k + 1] = ring.scalar(Fraction(-1, 2)) * rest
    return solution


def _kdv_at_depth(depth: int) -> Tuple[Fraction, PolyElement, bool, DiffPolynomialRing]:
    ring = DiffPolynomialRing(depth)
    solution = reduction_solution(ring)
    d3 = kp_flow(3, depth, ring)
    u_t = ring.substitute(d3(ring.a(1)), solution)
    if any(i != 1 for i, _ in ring.variables_of(u_t)):
        raise PrecisionError(f"reduction at depth {depth} leaves coefficients other than u")
    remainder = ring.scalar(4) * u_t - ring.scalar(12) * ring.a(1) * ring.a(1, 1)
    u_xxx = ring.a(1, 3)
    coefficient = _to_fraction(remainder.coeff(u_xxx))
    if remainder - ring.scalar(coefficient) * u_xxx:
        raise PropertyCheckError("reduced t_3 flow is not of the form 4u_t = c u''' + 12uu'")
    d2 = kp_flow(2, depth, ring)
    even = all(not ring.substitute(d2.image(i), solution) for i in d2.images if i in solution)
    return coefficient, u_t, even, ring


def derive_kdv(depth_cap: int = defaults.DEPTH_CAP, start_depth: int = 4) -> KdvReport:
    """4u_t - c u''' - 12uu' = 0 under the reduction (L^2)_- = 0, derived at two depths."""
    for depth in range(start_depth, depth_cap + 1):
        try:
            coefficient, u_t, even, ring = _kdv_at_depth(depth)
        except PrecisionError as exc:
            logger.debug("depth %s insufficient for the reduction: %s", depth, exc)
            continue
        report = KdvReport(coefficient, u_t, depth, ring, even)
        if depth + 1 <= depth_cap:
            check_coefficient, _, _, _ = _kdv_at_depth(depth + 1)
            report.check_depth = depth + 1
            report.check_coefficient = check_coefficient
        logger.info(
            f"KdV coefficient c = {format_rational(coefficient)} at depth {depth} "
            f"(printed value {format_rational(KDV_PRINTED_COEFFICIENT)})"
        )
        return report
    raise PrecisionError(f"no depth up to {depth_cap} determines the reduced t_3 flow")


class ParshinRing:
    """E = Q[[x1, x2]]((d1^-1))((d2^-1)) with explicit precision."""

    def __init__(
        self,
        x_caps: Tuple[Optional[int], Optional[int]] = (None, None),
        inner_floor: int = defaults.FLOOR,
        outer_floor: int = defaults.FLOOR,
    ):
        self.scalars = PowerSeriesRing(2, derivation=0, caps=x_caps)
        self.inner = OperatorRing(
            self.scalars,
            default_floor=inner_floor,
            coefficient_derivation=PowerSeriesRing(2, derivation=1, caps=x_caps),
        )
        self.outer = OperatorRing(self.inner, default_floor=outer_floor)

    def __repr__(self) -> str:
        return (
            f"ParshinRing(x_caps={self.scalars.caps}, inner_floor={self.inner.default_floor}, "
            f"outer_floor={self.outer.default_floor})"
        )

    def series(self, terms: Mapping[Tuple[int, int], Fraction]) -> TruncatedPowerSeries:
        return self.scalars.element({tuple(k): Fraction(v) for k, v in terms.items()})

    def element(self, terms: Mapping[Tuple[int, int], TruncatedPowerSeries]) -> OperatorWindow:
        """sum c_(i,j) d1^i d2^j with coefficients on the left."""
        by_outer: Dict[int, Dict[int, TruncatedPowerSeries]] = {}
        for (i, j), c in terms.items():
            if not isinstance(c, TruncatedPowerSeries):
                c = self.scalars.scalar(c)
            by_outer.setdefault(j, {})[i] = c
        return self.outer.make({j: self.inner.make(inner) for j, inner in by_outer.items()})

    def one(self) -> OperatorWindow:
        return self.outer.one()

    def delta1(self, k: int = 1) -> OperatorWindow:
        return self.outer.element(self.inner.symbol(k))

    def delta2(self, k: int = 1) -> OperatorWindow:
        return self.outer.make({k: self.inner.one()})

    def x(self, variable: int) -> OperatorWindow:
        return self.outer.element(self.inner.element(self.scalars.x(variable)))

    def compose(self, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
        return compose(self.outer, a, b)

    def vanishes(self, a: OperatorWindow) -> bool:
        return self.outer.vanishes(a)

    def lift(self, f: BiSeriesWindow) -> OperatorWindow:
        """u^a t^n -> d1^-a d2^-n; the windows become operator floors."""
        by_outer: Dict[int, Dict[int, TruncatedPowerSeries]] = {}
        for (n, a), c in f.terms.items():
            if isinstance(c, DualNumber):
                raise ValidationError("the operator action is defined over rational coefficients")
            by_outer.setdefault(-n, {})[-a] = self.scalars.scalar(c)
        for n in f.u_caps:
            by_outer.setdefault(-n, {})
        coefficients = {}
        for j, inner in by_outer.items():
            cap = f.u_caps.get(-j)
            floor = None if cap is None else -cap + 1
            coefficients[j] = self.inner.make(inner, floor)
        outer_floor = None if f.t_cap is None else -f.t_cap + 1
        return self.outer.make(coefficients, outer_floor)


@dataclass
class ParshinPair:
    L: OperatorWindow
    M: OperatorWindow

    def bracket(self, ring: ParshinRing) -> OperatorWindow:
        return commutator(ring.outer, self.L, self.M)

    def admissible(self, ring: ParshinRing) -> bool:
        """[L, M] vanishes on the window where it is known."""
        return ring.vanishes(self.bracket(ring))


def operator_inverse(ring: ParshinRing, lax: OperatorWindow) -> OperatorWindow:
    """L^-1 for L = d1 + (negative part in d2), as (1 + d1^-1 (L - d1))^-1 d1^-1."""
    tail = ring.outer.sub(lax, ring.delta1())
    if any(j >= 0 for j in tail.coefficients) or (tail.floor is not None and tail.floor > 0):
        raise NotInvertibleError("operator is not of the form d1 + negative part in d2")
    inverse_d1 = ring.delta1(-1)
    unit = ring.outer.add(ring.one(), ring.compose(inverse_d1, tail))
    return ring.compose(monic_inverse(ring.outer, unit), inverse_d1)


def _power_or_one(ring: ParshinRing, a: OperatorWindow, n: int) -> OperatorWindow:
    if n == 0:
        return ring.one()
    return power(ring.outer, a, n)


def parshin_flow(
    ring: ParshinRing,
    pair: ParshinPair,
    i: int,
    j: int,
    alpha: Optional[Fraction] = None,
    require_admissible: bool = True,
) -> Tuple[OperatorWindow, OperatorWindow]:
    """([(L^i M^j)_+, L], [(L^i M^j)_+, M]) with the split taken in d2."""
    if j < 0:
        raise ValidationError(f"j must be non-negative, got {j}")
    if alpha is not None:
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {alpha}")
        if i > alpha * j:
            raise ValidationError(f"index ({i}, {j}) violates i <= alpha*j for alpha = {alpha}")
    if require_admissible and not pair.admissible(ring):
        raise ValidationError("[L, M] does not vanish on the window")
    if i >= 0:
        l_power = _power_or_one(ring, pair.L, i)
    else:
        l_power = _power_or_one(ring, operator_inverse(ring, pair.L), -i)
    generator = ring.compose(l_power, _power_or_one(ring, pair.M, j))
    plus, _ = split(generator)
    return commutator(ring.outer, plus, pair.L), commutator(ring.outer, plus, pair.M)


def dress(ring: ParshinRing, s: OperatorWindow) -> ParshinPair:
    """(S^-1 d1 S, S^-1 d2 S)."""
    s_inverse = monic_inverse(ring.outer, s)
    lax = ring.compose(ring.compose(s_inverse, ring.delta1()), s)
    companion = ring.compose(ring.compose(s_inverse, ring.delta2()), s)
    return ParshinPair(lax, companion)


def random_monic(ring: ParshinRing, rng: random.Random, terms: int = 3) -> OperatorWindow:
    """1 + a few c x1^k x2^l d1^i d2^j with d2-degree j < 0."""
    coefficients: Dict[Tuple[int, int], TruncatedPowerSeries] = {(0, 0): ring.scalars.one()}
    for _ in range(terms):
        i, j = rng.randint(-2, 1), rng.randint(-2, -1)
        k, l = rng.randint(0, 2), rng.randint(0, 2)
        series = ring.series({(k, l): Fraction(rng.choice([-2, -1, 1, 2]))})
        coefficients[(i, j)] = coefficients[(i, j)] + series if (i, j) in coefficients else series
    return ring.element(coefficients)


def _factorial(k: int) -> int:
    result = 1
    for step in range(2, k + 1):
        result *= step
    return result


def apply_to_field(ring: ParshinRing, a: OperatorWindow, f: BiSeriesWindow, t_cap: int = defaults.T_CAP) -> BiSeriesWindow:
    """A . f in E / E.(x1, x2) = k((u))((t)).

    c x1^k x2^l d1^i d2^j is reduced to normal order with x on the right,
    where only the x-free part survives:
    (-1)^(k+l) C(i,k) C(j,l) k! l! c u^(k-i) t^(l-j).
    """
    product = ring.compose(a, ring.lift(f))
    terms: Dict[Tuple[int, int], Fraction] = {}
    bound_t = INFINITY if product.floor is None else 1 - product.floor
    level_caps: List[Tuple[int, float]] = []
    for j, inner in product.coefficients.items():
        inner_bound = INFINITY if inner.floor is None else 1 - inner.floor
        for i, series in inner.coefficients.items():
            for (k, l), c in series.terms.items():
                weight = binomial(i, k) * binomial(j, l) * _factorial(k) * _factorial(l)
                if not weight:
                    continue
                position = (l - j, k - i)
                value = (-1) ** (k + l) * weight * c
                terms[position] = terms.get(position, 0) + value
            if series.caps[0] is not None:
                inner_bound = min(inner_bound, series.caps[0] - i)
            if series.caps[1] is not None:
                bound_t = min(bound_t, series.caps[1] - j)
        if inner_bound != INFINITY:
            level_caps.append((j, inner_bound))
    result_t_cap = None if bound_t == INFINITY else int(bound_t)
    if level_caps and result_t_cap is None:
        result_t_cap = t_cap
    u_caps: Dict[int, int] = {}
    if level_caps:
        lowest = min(-j for j, _ in level_caps)
        for n in range(lowest, result_t_cap):
            relevant = [cap for j, cap in level_caps if j >= -n]
            if relevant:
                u_caps[n] = int(min(relevant))
    kept = {
        (n, u): c
        for (n, u), c in terms.items()
        if c and (result_t_cap is None or n < result_t_cap) and u < u_caps.get(n, INFINITY)
    }
    # x-powers only raise the t-exponent, so nothing lies below minus the top d2-degree
    floor = None
    if product.coefficients:
        floor = -max(product.coefficients)
    elif product.floor is not None:
        floor = 1 - product.floor
    return BiSeriesWindow(kept, result_t_cap, u_caps, floor)


def random_field_term(ring: ParshinRing, rng: random.Random) -> OperatorWindow:
    """c x1^k x2^l d1^i d2^j with k, l in [0, 2] and i, j in [-2, 0]."""
    k, l = rng.randint(0, 2), rng.randint(0, 2)
    i, j = rng.randint(-2, 0), rng.randint(-2, 0)
    return ring.element({(i, j): ring.series({(k, l): Fraction(rng.choice([-2, -1, 1, 3]))})})


def action_is_multiplicative(ring: ParshinRing, a: OperatorWindow, b: OperatorWindow, f: BiSeriesWindow) -> bool:
    """A . (B . f) == (A B) . f, with both sides exact."""
    stepwise = apply_to_field(ring, a, apply_to_field(ring, b, f))
    composed = apply_to_field(ring, ring.compose(a, b), f)
    return stepwise.is_exact and composed.is_exact and stepwise.terms == composed.terms


def action_base_cases(ring: ParshinRing) -> bool:
    """d1^-1 . 1 = u, d2^-1 . 1 = t and d1 . u = 1."""
    one = monomial(0, 0)
    return (
        apply_to_field(ring, ring.delta1(-1), one).terms == {(0, 1): 1}
        and apply_to_field(ring, ring.delta2(-1), one).terms == {(1, 0): 1}
        and apply_to_field(ring, ring.delta1(), monomial(0, 1)).terms == {(0, 0): 1}
    )
