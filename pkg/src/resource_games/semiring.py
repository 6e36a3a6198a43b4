"""Commutative semirings with induced order and residual.

Three kinds are provided:

* ``boolean``: or / and over {0, 1}, residual is the first projection.
* ``tropical-bounded B``: min / capped + over {0..B, inf}.
* ``tropical-rational-bounded B``: the same over exact rationals.

In the tropical kinds the induced order ``a ⊑ b`` is numeric ``a >= b``:
``inf`` (the semiring zero) is the bottom and ``0`` (the semiring one) is
the top.
"""
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .exceptions import SemiringError

logger = logging.getLogger(__name__)

INF = math.inf

BOOLEAN = "boolean"
TROPICAL = "tropical-bounded"
TROPICAL_RATIONAL = "tropical-rational-bounded"
KINDS = (BOOLEAN, TROPICAL, TROPICAL_RATIONAL)

_LITERAL = re.compile(r"^(?:inf|\d+(?:/\d+)?)$")


def _number(text: str) -> int | Fraction:
    """Parse a nonnegative integer or ``p/q`` literal."""
    if not _LITERAL.match(text) or text == "inf":
        raise SemiringError(f"Invalid numeric literal: {text!r}")
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise SemiringError(f"Invalid numeric literal: {text!r}") from e
    return int(value) if value.denominator == 1 else value


@dataclass(frozen=True)
class Semiring:
    """A semiring kind; bounded kinds carry their bound ``B``."""

    name: str
    bound: int | Fraction | None = None

    def __post_init__(self):
        if self.name not in KINDS:
            raise SemiringError(f"Unknown semiring kind: {self.name}")
        if self.name == BOOLEAN:
            if self.bound is not None:
                raise SemiringError("The boolean semiring takes no bound")
            return
        if self.bound is None or self.bound < 1:
            raise SemiringError(f"{self.name} requires a bound B >= 1")
        if self.name == TROPICAL and Fraction(self.bound).denominator != 1:
            raise SemiringError(f"{self.name} requires a natural bound, got {self.bound}")

    def __str__(self) -> str:
        if self.bound is None:
            return self.name
        return f"{self.name} {render_number(self.bound)}"

    @property
    def is_boolean(self) -> bool:
        return self.name == BOOLEAN

    @property
    def is_tropical(self) -> bool:
        return self.name != BOOLEAN

    @property
    def zero(self) -> "SemiringValue":
        return SemiringValue(self, False if self.is_boolean else INF)

    @property
    def one(self) -> "SemiringValue":
        return SemiringValue(self, True if self.is_boolean else 0)

    def value(self, payload) -> "SemiringValue":
        """Build a value, saturating tropical payloads above ``B`` to ``inf``."""
        if self.is_boolean:
            if payload not in (0, 1, True, False):
                raise SemiringError(f"Boolean payload must be 0 or 1, got {payload!r}")
            return SemiringValue(self, bool(payload))
        if payload == INF:
            return SemiringValue(self, INF)
        if isinstance(payload, bool) or not isinstance(payload, (int, Fraction)):
            raise SemiringError(f"Tropical payload must be a number, got {payload!r}")
        if payload < 0:
            raise SemiringError(f"Tropical payload must be nonnegative, got {payload}")
        if payload > self.bound:
            return SemiringValue(self, INF)
        if self.name == TROPICAL:
            if Fraction(payload).denominator != 1:
                raise SemiringError(f"{self} holds naturals only, got {payload}")
            return SemiringValue(self, int(payload))
        return SemiringValue(self, Fraction(payload))

    def parse(self, text: str) -> "SemiringValue":
        """Parse the textual rendering of a value of this kind."""
        text = text.strip()
        if self.is_boolean:
            if text not in ("0", "1"):
                raise SemiringError(f"Boolean value must be 0 or 1, got {text!r}")
            return self.value(text == "1")
        if text == "inf":
            return self.zero
        return self.value(_number(text))

    def rational(self) -> "Semiring":
        """The tropical-rational-bounded kind with the same bound."""
        if self.is_boolean:
            raise SemiringError("The boolean semiring has no rational variant")
        return Semiring(TROPICAL_RATIONAL, Fraction(self.bound))

    def lift(self, value: "SemiringValue") -> "SemiringValue":
        """Re-home a value of a compatible kind into this one."""
        if value.kind == self:
            return value
        if self.is_boolean or value.kind.is_boolean:
            raise SemiringError(f"Cannot lift {value.kind} value into {self}")
        return self.value(value.payload)

    # Semiring operations

    def add(self, a: "SemiringValue", b: "SemiringValue") -> "SemiringValue":
        _check(self, a, b)
        if self.is_boolean:
            return SemiringValue(self, a.payload or b.payload)
        return a if a.payload <= b.payload else b

    def mul(self, a: "SemiringValue", b: "SemiringValue") -> "SemiringValue":
        _check(self, a, b)
        if self.is_boolean:
            return SemiringValue(self, a.payload and b.payload)
        total = a.payload + b.payload
        return SemiringValue(self, INF if total > self.bound else total)

    def leq(self, a: "SemiringValue", b: "SemiringValue") -> bool:
        _check(self, a, b)
        if self.is_boolean:
            return a.payload <= b.payload
        return a.payload >= b.payload

    def residual(self, s: "SemiringValue", t: "SemiringValue") -> "SemiringValue":
        _check(self, s, t)
        if self.is_boolean:
            return s
        if s.payload == INF:
            return s
        if t.payload == INF:
            return self.one
        return SemiringValue(self, max(s.payload - t.payload, 0))

    # Folds

    def sum(self, values: Iterable["SemiringValue"]) -> "SemiringValue":
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total

    def product(self, values: Iterable["SemiringValue"]) -> "SemiringValue":
        total = self.one
        for v in values:
            total = self.mul(total, v)
        return total

    def infimum(self, values: Iterable["SemiringValue"]) -> "SemiringValue":
        """Greatest lower bound w.r.t. ⊑; the top for an empty family."""
        result = self.one
        for v in values:
            if self.leq(v, result):
                result = v
        return result

    def supremum(self, values: Iterable["SemiringValue"]) -> "SemiringValue":
        """Least upper bound w.r.t. ⊑; the bottom for an empty family."""
        result = self.zero
        for v in values:
            if self.leq(result, v):
                result = v
        return result


@dataclass(frozen=True)
class SemiringValue:
    """An element of a semiring; ``payload`` is a bool, a number or ``INF``."""

    kind: Semiring
    payload: bool | int | Fraction | float

    def __str__(self) -> str:
        if self.kind.is_boolean:
            return "1" if self.payload else "0"
        return render_number(self.payload)

    @property
    def is_zero(self) -> bool:
        return self == self.kind.zero

    @property
    def is_infinite(self) -> bool:
        return self.payload == INF

    @property
    def is_finite(self) -> bool:
        return not self.kind.is_boolean and self.payload != INF


def render_number(x) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _check(kind: Semiring, *values: SemiringValue) -> None:
    for v in values:
        if not isinstance(v, SemiringValue) or v.kind != kind:
            raise SemiringError(f"Kind mismatch: expected {kind}, got {getattr(v, 'kind', v)}")


def from_spec(name: str, bound: str | None = None) -> Semiring:
    """Build a semiring kind from its declaration, e.g. ``tropical-bounded 64``."""
    if name == BOOLEAN:
        if bound is not None:
            raise SemiringError("The boolean semiring takes no bound")
        return Semiring(BOOLEAN)
    if bound is None:
        raise SemiringError(f"{name} requires a bound")
    return Semiring(name, _number(bound))


def add(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    """Semiring sum (min in tropical kinds, or in boolean)."""
    return _kind_of(a, b).add(a, b)


def mul(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    """Semiring product (capped sum in tropical kinds, and in boolean)."""
    return _kind_of(a, b).mul(a, b)


def leq(a: SemiringValue, b: SemiringValue) -> bool:
    """Decide ``a ⊑ b``."""
    return _kind_of(a, b).leq(a, b)


def residual(s: SemiringValue, t: SemiringValue) -> SemiringValue:
    """``s ⊘ t``; capped subtraction in tropical kinds."""
    return _kind_of(s, t).residual(s, t)


def _kind_of(a: SemiringValue, b: SemiringValue) -> Semiring:
    if not isinstance(a, SemiringValue) or not isinstance(b, SemiringValue):
        raise SemiringError("Semiring operations take SemiringValue operands")
    if a.kind != b.kind:
        raise SemiringError(f"Kind mismatch: {a.kind} vs {b.kind}")
    return a.kind
