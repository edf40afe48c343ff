"""Exact scalars: rationals (``fractions.Fraction``) and dual numbers k[eps]/(eps^2)."""
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from kpwindow.errors import NotInvertibleError, ValidationError, ZeroDivisorError

Rational = Fraction

_OPERATIONS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def rational_arith(x: Fraction, y: Fraction, op: str) -> Fraction:
    """Exact field arithmetic on two rationals."""
    try:
        fn = _OPERATIONS[op]
    except KeyError:
        raise ValidationError(f"unknown operation {op!r}, expected one of {sorted(_OPERATIONS)}")
    if op == "div" and y == 0:
        raise ZeroDivisorError(f"division of {format_rational(x)} by zero")
    return Fraction(fn(Fraction(x), Fraction(y)))


@dataclass(frozen=True)
class DualNumber:
    """a + b*eps with eps^2 = 0."""

    value: Fraction
    infinitesimal: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        object.__setattr__(self, "infinitesimal", Fraction(self.infinitesimal))

    @staticmethod
    def coerce(other) -> "DualNumber":
        if isinstance(other, DualNumber):
            return other
        return DualNumber(Fraction(other), Fraction(0))

    def __add__(self, other) -> "DualNumber":
        other = DualNumber.coerce(other)
        return DualNumber(self.value + other.value, self.infinitesimal + other.infinitesimal)

    __radd__ = __add__

    def __neg__(self) -> "DualNumber":
        return DualNumber(-self.value, -self.infinitesimal)

    def __sub__(self, other) -> "DualNumber":
        return self + (-DualNumber.coerce(other))

    def __rsub__(self, other) -> "DualNumber":
        return DualNumber.coerce(other) - self

    def __mul__(self, other) -> "DualNumber":
        other = DualNumber.coerce(other)
        return DualNumber(
            self.value * other.value,
            self.value * other.infinitesimal + self.infinitesimal * other.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DualNumber":
        return self * dual_inverse(DualNumber.coerce(other))

    def __rtruediv__(self, other) -> "DualNumber":
        return DualNumber.coerce(other) * dual_inverse(self)

    def __bool__(self) -> bool:
        return bool(self.value) or bool(self.infinitesimal)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = DualNumber.coerce(other)
        if not isinstance(other, DualNumber):
            return NotImplemented
        return self.value == other.value and self.infinitesimal == other.infinitesimal

    def __hash__(self) -> int:
        if not self.infinitesimal:
            return hash(self.value)
        return hash((self.value, self.infinitesimal))

    def is_unit(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{format_rational(self.value)} + {format_rational(self.infinitesimal)}eps"


Scalar = Union[Fraction, DualNumber]


def dual_inverse(x: DualNumber) -> DualNumber:
    """(a + b eps)^-1 = a^-1 - a^-2 b eps, defined iff a != 0."""
    if x.value == 0:
        raise NotInvertibleError(f"dual number {x!r} has zero value part and is not a unit")
    inv = 1 / x.value
    return DualNumber(inv, -inv * inv * x.infinitesimal)


def invert(x: Scalar) -> Scalar:
    if isinstance(x, DualNumber):
        return dual_inverse(x)
    if x == 0:
        raise NotInvertibleError("zero is not a unit")
    return 1 / Fraction(x)


def is_unit(x: Scalar) -> bool:
    if isinstance(x, DualNumber):
        return x.is_unit()
    return x != 0


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text, path: str = "") -> Fraction:
    if isinstance(text, bool):
        raise ValidationError(f"expected a rational, got {text!r}", path)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValidationError(f"expected a rational string 'p/q', got {text!r}", path)
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a rational: {text!r}", path)
    if "." in text or "e" in text.lower():
        raise ValidationError(f"rationals are written as 'p/q', got {text!r}", path)
    return value


def format_dual(x: DualNumber) -> dict:
    return {"v": format_rational(x.value), "eps": format_rational(x.infinitesimal)}


def parse_dual(data, path: str = "") -> DualNumber:
    if not isinstance(data, dict) or set(data) != {"v", "eps"}:
        raise ValidationError("expected an object with keys 'v' and 'eps'", path)
    return DualNumber(parse_rational(data["v"], f"{path}.v"), parse_rational(data["eps"], f"{path}.eps"))


def format_scalar(x: Scalar):
    if isinstance(x, DualNumber):
        return format_dual(x)
    return format_rational(x)


def parse_scalar(data, path: str = "") -> Scalar:
    if isinstance(data, dict):
        return parse_dual(data, path)
    return parse_rational(data, path)
