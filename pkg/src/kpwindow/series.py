"""Truncated exact series.

Two families live here:

* ``TruncatedPowerSeries`` over Q in a fixed number of variables, known modulo
  the monomial ideal generated by ``x_j ** caps[j]``. ``PowerSeriesRing``
  wraps it as a differential ring so the operator module can build
  ``Q[[x]]((d^-1))`` and ``Q[[x1, x2]]((d1^-1))((d2^-1))`` on top of it.
* ``BiSeriesWindow``, a window of the two-dimensional local field
  ``k((u))((t))``. A window is the region ``t < t_cap`` and, on level ``t = n``,
  ``u < u_caps[n]``. Everything inside the window is exact, everything outside
  is unknown. Levels below ``t_floor`` are exactly zero.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Protocol, Tuple, Union

from kpwindow import defaults
from kpwindow.coefficients import DualNumber, Scalar, invert, is_unit
from kpwindow.errors import NotInvertibleError, PrecisionError, ValidationError

logger = logging.getLogger(__name__)

INFINITY = float("inf")

Exponent = Tuple[int, ...]


def _cap_min(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _as_bound(cap: Optional[int]):
    return INFINITY if cap is None else cap


class DifferentialRing(Protocol):
    """What the operator module needs from a coefficient ring."""

    def zero(self): ...

    def one(self): ...

    def scalar(self, c: Fraction): ...

    def add(self, a, b): ...

    def sub(self, a, b): ...

    def neg(self, a): ...

    def mul(self, a, b): ...

    def derive(self, a): ...

    def is_exact_zero(self, a) -> bool: ...

    def vanishes(self, a) -> bool: ...

    def is_one(self, a) -> bool: ...

    def is_exhausted(self, a) -> bool: ...


@dataclass(frozen=True)
class TruncatedPowerSeries:
    """A power series over Q known modulo (x_1^N_1, ..., x_m^N_m); a ``None`` cap is exact."""

    terms: Mapping[Exponent, Fraction]
    caps: Tuple[Optional[int], ...]

    def __post_init__(self):
        caps = tuple(self.caps)
        cleaned = {}
        for exponent, coefficient in self.terms.items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != len(caps):
                raise ValidationError(f"exponent {exponent} does not match {len(caps)} variables")
            if any(e < 0 for e in exponent):
                raise ValidationError(f"negative exponent {exponent} in a power series")
            if any(cap is not None and e >= cap for e, cap in zip(exponent, caps)):
                continue
            coefficient = Fraction(coefficient)
            if coefficient:
                cleaned[exponent] = coefficient
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "caps", caps)

    @property
    def variables(self) -> int:
        return len(self.caps)

    @property
    def is_exact(self) -> bool:
        return all(cap is None for cap in self.caps)

    @property
    def is_exhausted(self) -> bool:
        return any(cap is not None and cap <= 0 for cap in self.caps)

    def _coerce(self, other) -> "TruncatedPowerSeries":
        if isinstance(other, TruncatedPowerSeries):
            if other.variables != self.variables:
                raise ValidationError("power series in different numbers of variables")
            return other
        return TruncatedPowerSeries({(0,) * self.variables: Fraction(other)}, (None,) * self.variables)

    def __add__(self, other) -> "TruncatedPowerSeries":
        other = self._coerce(other)
        terms = dict(self.terms)
        for exponent, coefficient in other.terms.items():
            terms[exponent] = terms.get(exponent, 0) + coefficient
        return TruncatedPowerSeries(terms, tuple(_cap_min(a, b) for a, b in zip(self.caps, other.caps)))

    __radd__ = __add__

    def __neg__(self) -> "TruncatedPowerSeries":
        return TruncatedPowerSeries({e: -c for e, c in self.terms.items()}, self.caps)

    def __sub__(self, other) -> "TruncatedPowerSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedPowerSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedPowerSeries":
        other = self._coerce(other)
        caps = tuple(_cap_min(a, b) for a, b in zip(self.caps, other.caps))
        terms: Dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exponent = tuple(a + b for a, b in zip(ea, eb))
                if any(cap is not None and e >= cap for e, cap in zip(exponent, caps)):
                    continue
                terms[exponent] = terms.get(exponent, 0) + ca * cb
        return TruncatedPowerSeries(terms, caps)

    __rmul__ = __mul__

    def derive(self, variable: int) -> "TruncatedPowerSeries":
        """Partial derivative; the cap of ``variable`` drops by one."""
        terms = {}
        for exponent, coefficient in self.terms.items():
            if exponent[variable] == 0:
                continue
            lowered = list(exponent)
            lowered[variable] -= 1
            terms[tuple(lowered)] = coefficient * exponent[variable]
        caps = list(self.caps)
        if caps[variable] is not None:
            caps[variable] -= 1
        return TruncatedPowerSeries(terms, tuple(caps))

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self.terms.get(tuple(exponent), Fraction(0))

    def agrees_with(self, other: "TruncatedPowerSeries") -> bool:
        caps = tuple(_cap_min(a, b) for a, b in zip(self.caps, other.caps))
        mine = TruncatedPowerSeries(self.terms, caps)
        theirs = TruncatedPowerSeries(other.terms, caps)
        return mine.terms == theirs.terms

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*x^{e}" for e, c in sorted(self.terms.items())) or "0"
        return f"TruncatedPowerSeries({body}, caps={self.caps})"


def derivation_x(series: TruncatedPowerSeries) -> TruncatedPowerSeries:
    """d/dx on Q[[x]]."""
    if series.variables != 1:
        raise ValidationError(f"derivation_x expects a series in one variable, got {series.variables}")
    return series.derive(0)


class PowerSeriesRing:
    """Q[[x_1..x_m]] with the partial derivative in ``derivation`` as distinguished derivation."""

    def __init__(self, variables: int = 1, derivation: int = 0, caps: Optional[Tuple[Optional[int], ...]] = None):
        if not 0 <= derivation < variables:
            raise ValidationError(f"derivation index {derivation} outside 0..{variables - 1}")
        self.variables = variables
        self.derivation = derivation
        self.caps = tuple(caps) if caps is not None else (None,) * variables

    def __repr__(self) -> str:
        return f"PowerSeriesRing(variables={self.variables}, derivation={self.derivation})"

    def element(self, terms: Mapping[Exponent, Fraction]) -> TruncatedPowerSeries:
        return TruncatedPowerSeries(terms, self.caps)

    def x(self, variable: int) -> TruncatedPowerSeries:
        exponent = [0] * self.variables
        exponent[variable] = 1
        return self.element({tuple(exponent): Fraction(1)})

    def zero(self) -> TruncatedPowerSeries:
        return TruncatedPowerSeries({}, (None,) * self.variables)

    def one(self) -> TruncatedPowerSeries:
        return self.scalar(Fraction(1))

    def scalar(self, c) -> TruncatedPowerSeries:
        return TruncatedPowerSeries({(0,) * self.variables: Fraction(c)}, (None,) * self.variables)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def derive(self, a: TruncatedPowerSeries) -> TruncatedPowerSeries:
        return a.derive(self.derivation)

    def is_exact_zero(self, a: TruncatedPowerSeries) -> bool:
        return not a.terms and a.is_exact

    def vanishes(self, a: TruncatedPowerSeries) -> bool:
        return not a.terms

    def is_one(self, a: TruncatedPowerSeries) -> bool:
        return a.is_exact and a.terms == {(0,) * self.variables: Fraction(1)}

    def is_exhausted(self, a: TruncatedPowerSeries) -> bool:
        return a.is_exhausted


@dataclass(frozen=True)
class LaurentWindow:
    """One level of a bi-series: a window of k((u))."""

    coefficients: Mapping[int, Scalar]
    known_below: Optional[int] = None
    known_up_to: Optional[int] = None

    @property
    def is_exact(self) -> bool:
        return self.known_up_to is None

    def valuation(self) -> Optional[int]:
        if self.coefficients:
            return min(self.coefficients)
        return None


Position = Tuple[int, int]
UCapRule = Union[int, Callable[[int], int], None]


@dataclass(frozen=True)
class BiSeriesWindow:
    """A window of k((u))((t)).

    ``terms`` maps ``(t_exponent, u_exponent)`` to a scalar. ``t_cap`` is the
    first unknown t-level (``None``: every level is known). ``u_caps[n]`` is
    the first unknown u-exponent on level ``n`` (absent: the level is exact).
    ``t_floor`` is the declared lower bound below which the element vanishes.
    """

    terms: Mapping[Position, Scalar] = field(default_factory=dict)
    t_cap: Optional[int] = None
    u_caps: Mapping[int, int] = field(default_factory=dict)
    t_floor: Optional[int] = None

    def __post_init__(self):
        t_cap = self.t_cap
        u_caps = {int(n): int(cap) for n, cap in self.u_caps.items() if t_cap is None or n < t_cap}
        terms = {}
        for (n, a), c in self.terms.items():
            if not c:
                continue
            if t_cap is not None and n >= t_cap:
                raise ValidationError(f"term t^{n}u^{a} lies beyond the t-cap {t_cap}")
            if n in u_caps and a >= u_caps[n]:
                raise ValidationError(f"term t^{n}u^{a} lies beyond the u-cap {u_caps[n]} of its level")
            terms[(int(n), int(a))] = c
        t_floor = self.t_floor
        if t_floor is None:
            candidates = [n for n, _ in terms] + list(u_caps)
            if t_cap is not None:
                candidates.append(t_cap)
            t_floor = min(candidates) if candidates else None
        elif any(n < t_floor for n, _ in terms):
            raise ValidationError(f"a stored term lies below the declared t-floor {t_floor}")
        if t_floor is not None:
            u_caps = {n: cap for n, cap in u_caps.items() if n >= t_floor}
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "u_caps", u_caps)
        object.__setattr__(self, "t_floor", t_floor)

    @property
    def is_exact(self) -> bool:
        return self.t_cap is None and not self.u_caps

    @property
    def is_exact_zero(self) -> bool:
        return self.is_exact and not self.terms

    @property
    def exhausted(self) -> bool:
        """No level of the window is known: precision has run out."""
        return self.t_cap is not None and self.t_floor is not None and self.t_cap <= self.t_floor

    def u_cap(self, n: int):
        if self.t_cap is not None and n >= self.t_cap:
            return -INFINITY
        return self.u_caps.get(n, INFINITY)

    def knows(self, n: int, a: int) -> bool:
        if self.t_floor is not None and n < self.t_floor:
            return True
        return a < self.u_cap(n)

    def coefficient(self, n: int, a: int) -> Scalar:
        if not self.knows(n, a):
            raise PrecisionError(f"coefficient of t^{n}u^{a} lies outside the window")
        return self.terms.get((n, a), Fraction(0))

    def levels(self) -> Iterable[int]:
        """Levels that may carry a nonzero coefficient inside the window."""
        return sorted({n for n, _ in self.terms} | set(self.u_caps))

    def level_valuation(self, n: int):
        """Lower bound for the u-valuation of level ``n``, counting its unknown part."""
        exponents = [a for m, a in self.terms if m == n]
        bound = min(exponents) if exponents else INFINITY
        return min(bound, self.u_caps.get(n, INFINITY))

    def t_valuation(self):
        """Lower bound for the lowest level that may be nonzero."""
        levels = self.levels()
        bound = levels[0] if levels else INFINITY
        return min(bound, _as_bound(self.t_cap))

    def level(self, n: int) -> LaurentWindow:
        cap = self.u_cap(n)
        return LaurentWindow(
            {a: c for (m, a), c in self.terms.items() if m == n},
            known_below=None,
            known_up_to=None if cap == INFINITY else cap,
        )

    def __add__(self, other):
        return bi_add(self, other)

    def __sub__(self, other):
        return bi_sub(self, other)

    def __neg__(self):
        return bi_scale(self, Fraction(-1))

    def __mul__(self, other):
        return bi_mul(self, other)


def monomial(t: int, u: int, c: Scalar = Fraction(1)) -> BiSeriesWindow:
    return BiSeriesWindow({(t, u): c})


def zero_series() -> BiSeriesWindow:
    return BiSeriesWindow({})


def truncated(terms: Mapping[Position, Scalar], t_cap: int, u_cap: int, t_floor: int) -> BiSeriesWindow:
    """A window with uniform u-cap on every level of [t_floor, t_cap)."""
    u_caps = {n: u_cap for n in range(t_floor, t_cap)}
    kept = {(n, a): c for (n, a), c in terms.items() if n < t_cap and a < u_cap}
    return BiSeriesWindow(kept, t_cap, u_caps, t_floor)


def _min_floor(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def bi_scale(x: BiSeriesWindow, c: Scalar) -> BiSeriesWindow:
    return BiSeriesWindow({p: c * v for p, v in x.terms.items()}, x.t_cap, x.u_caps, x.t_floor)


def bi_add(x: BiSeriesWindow, y: BiSeriesWindow) -> BiSeriesWindow:
    t_cap = _cap_min(x.t_cap, y.t_cap)
    u_caps: Dict[int, int] = {}
    for n in set(x.u_caps) | set(y.u_caps):
        if t_cap is not None and n >= t_cap:
            continue
        u_caps[n] = int(min(x.u_caps.get(n, INFINITY), y.u_caps.get(n, INFINITY)))
    terms: Dict[Position, Scalar] = {}
    for source in (x.terms, y.terms):
        for (n, a), c in source.items():
            if t_cap is not None and n >= t_cap:
                continue
            if n in u_caps and a >= u_caps[n]:
                continue
            terms[(n, a)] = terms[(n, a)] + c if (n, a) in terms else c
    return BiSeriesWindow(terms, t_cap, u_caps, _min_floor(x.t_floor, y.t_floor))


def bi_sub(x: BiSeriesWindow, y: BiSeriesWindow) -> BiSeriesWindow:
    return bi_add(x, bi_scale(y, Fraction(-1)))


def bi_mul(x: BiSeriesWindow, y: BiSeriesWindow) -> BiSeriesWindow:
    """Product with the tightest window the factors' windows allow."""
    if x.is_exact_zero or y.is_exact_zero:
        return zero_series()
    vx, vy = x.t_valuation(), y.t_valuation()
    bound = min(_as_bound(x.t_cap) + vy, _as_bound(y.t_cap) + vx)
    t_cap = None if bound == INFINITY else int(bound)

    u_bounds: Dict[int, float] = {}
    for p in x.levels():
        for q in y.levels():
            n = p + q
            if t_cap is not None and n >= t_cap:
                continue
            cap = min(
                x.u_caps.get(p, INFINITY) + y.level_valuation(q),
                y.u_caps.get(q, INFINITY) + x.level_valuation(p),
            )
            if cap < u_bounds.get(n, INFINITY):
                u_bounds[n] = cap
    u_caps = {n: int(cap) for n, cap in u_bounds.items() if cap != INFINITY}

    terms: Dict[Position, Scalar] = {}
    for (p, a), c in x.terms.items():
        for (q, b), d in y.terms.items():
            n, e = p + q, a + b
            if t_cap is not None and n >= t_cap:
                continue
            if n in u_caps and e >= u_caps[n]:
                continue
            product = c * d
            terms[(n, e)] = terms[(n, e)] + product if (n, e) in terms else product
    t_floor = None
    if x.t_floor is not None and y.t_floor is not None:
        t_floor = x.t_floor + y.t_floor
    result = BiSeriesWindow(terms, t_cap, u_caps, t_floor)
    if result.exhausted:
        logger.debug("product window collapsed: t_cap %s <= t_floor %s", result.t_cap, result.t_floor)
    return result


def restrict(x: BiSeriesWindow, t_cap: Optional[int] = None, u_cap: UCapRule = None) -> BiSeriesWindow:
    """Forget everything outside the given window (never claims new knowledge)."""
    if x.is_exact_zero:
        return x
    new_t_cap = _cap_min(x.t_cap, t_cap)
    u_caps = dict(x.u_caps)
    if u_cap is not None:
        rule = u_cap if callable(u_cap) else (lambda n, cap=u_cap: cap)
        for n in set(n for n, _ in x.terms) | set(x.u_caps):
            u_caps[n] = int(min(u_caps.get(n, INFINITY), rule(n)))
    u_caps = {n: cap for n, cap in u_caps.items() if new_t_cap is None or n < new_t_cap}
    terms = {
        (n, a): c
        for (n, a), c in x.terms.items()
        if (new_t_cap is None or n < new_t_cap) and a < u_caps.get(n, INFINITY)
    }
    t_floor = x.t_floor
    if t_floor is None and new_t_cap is not None:
        t_floor = new_t_cap
    return BiSeriesWindow(terms, new_t_cap, u_caps, t_floor)


def agrees_with(x: BiSeriesWindow, y: BiSeriesWindow) -> bool:
    """Equality on the positions both windows know."""
    for position in set(x.terms) | set(y.terms):
        if x.knows(*position) and y.knows(*position):
            if x.terms.get(position, 0) != y.terms.get(position, 0):
                return False
    return True


def t_order(x: BiSeriesWindow) -> int:
    """Least t-exponent with a nonzero coefficient."""
    if x.is_exact_zero:
        raise ValidationError("the order of zero is undefined")
    stored = sorted({n for n, _ in x.terms})
    if not stored:
        raise PrecisionError("no nonzero level is known inside the window")
    lowest = stored[0]
    if any(n < lowest for n in x.u_caps):
        raise PrecisionError(f"a truncated level lies below level {lowest}; the order is undetermined")
    return lowest


def leading_term(x: BiSeriesWindow) -> Tuple[int, int, Scalar]:
    n = t_order(x)
    exponents = [a for m, a in x.terms if m == n]
    a = min(exponents)
    return n, a, x.terms[(n, a)]


def bi_inverse(x: BiSeriesWindow, t_cap: int = defaults.T_CAP, u_cap: int = defaults.U_CAP) -> BiSeriesWindow:
    """Inverse of a unit, exact on the requested window (absolute ``t_cap``, uniform ``u_cap``).

    x = c t^n u^a (1 + y) with y supported on (level 0, u > 0) or level > 0,
    and the inverse is the geometric series in -y.
    """
    if x.is_exact_zero:
        raise NotInvertibleError("zero is not invertible")
    n0, a0, lead = leading_term(x)
    if not is_unit(lead):
        raise NotInvertibleError(f"leading coefficient {lead!r} of t^{n0}u^{a0} is not a unit")
    lead_inverse = invert(lead)
    if x.is_exact and len(x.terms) == 1:
        return monomial(-n0, -a0, lead_inverse)

    shift = monomial(-n0, -a0, lead_inverse)
    normalized = bi_mul(x, shift)
    y = bi_sub(normalized, monomial(0, 0, Fraction(1)))
    if y.is_exact_zero:
        return shift

    t_rel = max(1, t_cap + n0)
    u_rel = max(1, u_cap + a0)
    if y.t_cap is not None:
        t_rel = min(t_rel, y.t_cap)
    higher = [y.level_valuation(n) for n in y.levels() if n >= 1]
    v_min = min(higher) if higher else INFINITY
    drop = 0 if v_min == INFINITY else max(0, -int(v_min))
    growth = 0 if v_min == INFINITY else max(0, 1 - int(v_min))
    j_max = u_rel + (t_rel - 1) * growth

    def working_cap(k: int) -> int:
        return u_rel + max(0, t_rel - 1 - k) * drop

    minus_y = restrict(bi_scale(y, Fraction(-1)), t_rel, working_cap)
    total = monomial(0, 0, Fraction(1))
    power = monomial(0, 0, Fraction(1))
    for j in range(1, j_max + 1):
        power = restrict(bi_mul(power, minus_y), t_rel, working_cap)
        if not power.terms:
            break
        total = bi_add(total, power)
    # the dropped tail only reaches u >= u_rel or t >= t_rel, so every level is capped
    u_caps = {k: int(min(total.u_caps.get(k, INFINITY), u_rel)) for k in range(0, t_rel)}
    kept = {(k, a): c for (k, a), c in total.terms.items() if k < t_rel and a < u_caps[k]}
    total = BiSeriesWindow(kept, t_rel, u_caps, 0)
    logger.debug("inverse expanded up to %s geometric terms on window t<%s, u<%s", j_max, t_rel, u_rel)
    return bi_mul(total, shift)


def split_dual(x: BiSeriesWindow) -> Tuple[BiSeriesWindow, BiSeriesWindow]:
    """(value part, eps part) of a series with dual-number coefficients."""
    values, infinitesimals = {}, {}
    for position, c in x.terms.items():
        c = DualNumber.coerce(c)
        values[position] = c.value
        infinitesimals[position] = c.infinitesimal
    return (
        BiSeriesWindow(values, x.t_cap, x.u_caps, x.t_floor),
        BiSeriesWindow(infinitesimals, x.t_cap, x.u_caps, x.t_floor),
    )


def dual_lift(value: BiSeriesWindow, infinitesimal: BiSeriesWindow) -> BiSeriesWindow:
    """value + eps * infinitesimal."""
    terms: Dict[Position, DualNumber] = {}
    for position, c in value.terms.items():
        terms[position] = DualNumber(c)
    for position, c in infinitesimal.terms.items():
        base = terms.get(position, DualNumber(0))
        terms[position] = base + DualNumber(0, DualNumber.coerce(c).value)
    window = bi_add(bi_scale(value, Fraction(0)), bi_scale(infinitesimal, Fraction(0)))
    terms = {(n, a): c for (n, a), c in terms.items() if a < window.u_cap(n)}
    return BiSeriesWindow(terms, window.t_cap, window.u_caps, window.t_floor)
