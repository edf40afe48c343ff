"""Pseudodifferential operators sum a_i d^i over a differential ring.

An ``OperatorWindow`` stores its coefficients by exponent together with a
``floor``: exponents below the floor are unknown (``None`` means the operator
is a finite exact sum). Composition uses

    d^i o a = sum_{k >= 0} C(i, k) d^k(a) d^(i - k)

and recomputes the provable floor every time. ``OperatorRing`` is itself a
differential ring, so operators in d2 with coefficients that are operators
in d1 are just an ``OperatorRing`` over an ``OperatorRing``.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple

from kpwindow import defaults
from kpwindow.errors import NotInvertibleError, ValidationError
from kpwindow.series import DifferentialRing

logger = logging.getLogger(__name__)

INFINITY = float("inf")


def binomial(i: int, k: int) -> Fraction:
    """C(i, k) = i(i-1)...(i-k+1) / k! for any integer i."""
    if k < 0:
        raise ValidationError(f"binomial lower index must be non-negative, got {k}")
    numerator, denominator = 1, 1
    for step in range(k):
        numerator *= i - step
        denominator *= step + 1
    return Fraction(numerator, denominator)


@dataclass(frozen=True)
class OperatorWindow:
    coefficients: Mapping[int, Any] = field(default_factory=dict)
    floor: Optional[int] = None

    @property
    def is_exact(self) -> bool:
        return self.floor is None

    @property
    def top_degree(self):
        if self.coefficients:
            return max(self.coefficients)
        if self.floor is None:
            return -INFINITY
        return self.floor - 1

    def coefficient(self, i: int, ring: DifferentialRing):
        return self.coefficients.get(i, ring.zero())

    def exponents(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coefficients, reverse=True))


def _floor_max(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class OperatorRing:
    """R((d^-1)) for a differential ring R, itself a differential ring.

    ``default_floor`` is where exact compositions with infinite tails are
    cut. ``coefficient_derivation`` is the derivation this ring exposes to an
    outer ring: it acts on coefficients and commutes with d.
    """

    def __init__(
        self,
        base: DifferentialRing,
        default_floor: int = defaults.FLOOR,
        coefficient_derivation: Optional[DifferentialRing] = None,
    ):
        if default_floor > 0:
            raise ValidationError(f"operator floor must be <= 0, got {default_floor}")
        self.base = base
        self.default_floor = default_floor
        self.coefficient_derivation = coefficient_derivation or base

    def __repr__(self) -> str:
        return f"OperatorRing({self.base!r}, default_floor={self.default_floor})"

    def make(self, coefficients: Mapping[int, Any], floor: Optional[int] = None) -> OperatorWindow:
        """Build a normalized window: exact zeros and sub-floor terms dropped."""
        base = self.base
        kept: Dict[int, Any] = {}
        for i, c in coefficients.items():
            if floor is not None and i < floor:
                continue
            if base.is_exhausted(c):
                floor = _floor_max(floor, i + 1)
                continue
            if not base.is_exact_zero(c):
                kept[int(i)] = c
        if floor is not None:
            kept = {i: c for i, c in kept.items() if i >= floor}
        return OperatorWindow(kept, floor)

    # differential ring protocol

    def zero(self) -> OperatorWindow:
        return OperatorWindow({}, None)

    def one(self) -> OperatorWindow:
        return OperatorWindow({0: self.base.one()}, None)

    def scalar(self, c) -> OperatorWindow:
        return self.make({0: self.base.scalar(c)})

    def symbol(self, exponent: int = 1) -> OperatorWindow:
        """d^exponent."""
        return OperatorWindow({exponent: self.base.one()}, None)

    def element(self, coefficient) -> OperatorWindow:
        return self.make({0: coefficient})

    def add(self, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
        floor = _floor_max(a.floor, b.floor)
        coefficients = dict(a.coefficients)
        for i, c in b.coefficients.items():
            coefficients[i] = self.base.add(coefficients[i], c) if i in coefficients else c
        return self.make(coefficients, floor)

    def neg(self, a: OperatorWindow) -> OperatorWindow:
        return OperatorWindow({i: self.base.neg(c) for i, c in a.coefficients.items()}, a.floor)

    def sub(self, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
        return self.add(a, self.neg(b))

    def mul(self, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
        return compose(self, a, b)

    def derive(self, a: OperatorWindow) -> OperatorWindow:
        derivation = self.coefficient_derivation
        return self.make({i: derivation.derive(c) for i, c in a.coefficients.items()}, a.floor)

    def is_exact_zero(self, a: OperatorWindow) -> bool:
        return a.is_exact and not a.coefficients

    def vanishes(self, a: OperatorWindow) -> bool:
        return all(self.base.vanishes(c) for c in a.coefficients.values())

    def is_one(self, a: OperatorWindow) -> bool:
        return a.is_exact and set(a.coefficients) == {0} and self.base.is_one(a.coefficients[0])

    def is_exhausted(self, a: OperatorWindow) -> bool:
        return False

    def scale(self, a: OperatorWindow, coefficient) -> OperatorWindow:
        """coefficient * a, multiplying on the left by a d-free element."""
        return self.make({i: self.base.mul(coefficient, c) for i, c in a.coefficients.items()}, a.floor)


def compose(ring: OperatorRing, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
    """a o b with the provable floor."""
    base = ring.base
    if ring.is_exact_zero(a) or ring.is_exact_zero(b):
        return ring.zero()
    top_a, top_b = a.top_degree, b.top_degree
    bound = INFINITY
    if a.floor is not None:
        bound = min(bound, a.floor + top_b)
    if b.floor is not None:
        bound = min(bound, b.floor + top_a)
    exact = bound == INFINITY
    cutoff = ring.default_floor if exact else int(bound)
    floor: Optional[int] = None if exact else int(bound)
    cut = False

    result: Dict[int, Any] = {}
    for i, ai in a.coefficients.items():
        for j, bj in b.coefficients.items():
            derivative = bj
            k = 0
            while True:
                degree = i + j - k
                if degree < cutoff:
                    if exact and not base.is_exact_zero(derivative):
                        cut = True
                    break
                if base.is_exhausted(derivative):
                    floor = _floor_max(floor, degree + 1)
                    exact = False
                    break
                weight = binomial(i, k)
                if weight and not base.is_exact_zero(derivative):
                    term = base.mul(ai, derivative)
                    term = base.mul(base.scalar(weight), term)
                    result[degree] = base.add(result[degree], term) if degree in result else term
                if i >= 0 and k >= i:
                    break
                if base.is_exact_zero(derivative):
                    break
                derivative = base.derive(derivative)
                k += 1
    if cut:
        floor = _floor_max(floor, cutoff)
        logger.debug("exact composition cut at default floor %s", cutoff)
    return ring.make(result, floor)


def restrict(ring: OperatorRing, a: OperatorWindow, floor: int) -> OperatorWindow:
    return ring.make(a.coefficients, _floor_max(a.floor, floor))


def add(ring: OperatorRing, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
    return ring.add(a, b)


def split(a: OperatorWindow) -> Tuple[OperatorWindow, OperatorWindow]:
    """(A_+, A_-): exponents >= 0 and exponents < 0."""
    plus = {i: c for i, c in a.coefficients.items() if i >= 0}
    minus = {i: c for i, c in a.coefficients.items() if i < 0}
    plus_floor = a.floor if a.floor is not None and a.floor > 0 else None
    minus_floor = None if a.floor is None else min(a.floor, 0)
    return OperatorWindow(plus, plus_floor), OperatorWindow(minus, minus_floor)


def power(ring: OperatorRing, a: OperatorWindow, n: int) -> OperatorWindow:
    if n < 1:
        raise ValidationError(f"power expects n >= 1, got {n}")
    result = a
    for _ in range(n - 1):
        result = compose(ring, result, a)
    return result


def commutator(ring: OperatorRing, a: OperatorWindow, b: OperatorWindow) -> OperatorWindow:
    return ring.sub(compose(ring, a, b), compose(ring, b, a))


def is_monic_unit(ring: OperatorRing, s: OperatorWindow) -> bool:
    """s = 1 + (terms of negative degree)."""
    if 0 not in s.coefficients or not ring.base.is_one(s.coefficients[0]):
        return False
    if s.floor is not None and s.floor > 0:
        return False
    return all(i <= 0 for i in s.coefficients)


def monic_inverse(ring: OperatorRing, s: OperatorWindow) -> OperatorWindow:
    """(1 + s_-)^-1 = sum_j (-s_-)^j, exact down to the input floor (or the default floor)."""
    if not is_monic_unit(ring, s):
        raise NotInvertibleError(
            f"operator with exponents {s.exponents()} is not of the form 1 + negative part"
        )
    target = s.floor if s.floor is not None else ring.default_floor
    _, minus = split(s)
    step = ring.neg(minus)
    total = ring.one()
    term = ring.one()
    for j in range(1, -target + 1):
        term = compose(ring, term, step)
        if ring.is_exact_zero(term):
            # nilpotent tail: the Neumann sum is finite
            return total
        term = restrict(ring, term, target)
        total = ring.add(total, term)
    return restrict(ring, total, target)
