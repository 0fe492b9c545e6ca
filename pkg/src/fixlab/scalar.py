"""Scalar values and comparison policies.

Exact scalars are :class:`fractions.Fraction` (or ``int``); approximate ones are
``float``. Every comparison that decides a verdict goes through a policy so the
strict/non-strict distinction is never left to chance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import ParameterError

Scalar = Union[Fraction, int, float]


@dataclass(frozen=True)
class Exact:
    """Plain rational comparison: ``a < b`` is decided exactly."""

    name = "exact"

    def lt(self, a: Scalar, b: Scalar) -> bool:
        return a < b

    def le(self, a: Scalar, b: Scalar) -> bool:
        return a <= b

    def eq(self, a: Scalar, b: Scalar) -> bool:
        return a == b

    def is_zero(self, a: Scalar) -> bool:
        return a == 0


@dataclass(frozen=True)
class Epsilon:
    """Tolerant comparison for float backends.

    ``a < b`` means ``a < b - eps`` and ``a <= b`` means ``a <= b + eps``.
    """

    eps: float = 1e-12
    name = "epsilon"

    def __post_init__(self):
        if not self.eps >= 0:
            raise ParameterError(f"epsilon must be nonnegative, got {self.eps!r}")

    def lt(self, a: Scalar, b: Scalar) -> bool:
        return a < b - self.eps

    def le(self, a: Scalar, b: Scalar) -> bool:
        return a <= b + self.eps

    def eq(self, a: Scalar, b: Scalar) -> bool:
        return abs(a - b) <= self.eps

    def is_zero(self, a: Scalar) -> bool:
        return abs(a) <= self.eps


Policy = Union[Exact, Epsilon]
EXACT = Exact()


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"3/5"``, ``"-7"`` or ``"0.65"`` into an exact fraction.

    Decimal strings are scaled to an exact rational, never routed through float.
    """
    if isinstance(text, Rational):
        return Fraction(text)
    if isinstance(text, float):
        raise ParameterError("refusing to convert a float silently; pass a string")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not a rational number: {text!r}") from exc


def format_scalar(value: Scalar | None) -> str | None:
    """Interchange form: ``"p/q"`` for rationals, ``repr`` for floats."""
    if value is None:
        return None
    if isinstance(value, float):
        return repr(value)
    return str(Fraction(value))


def ratio(num: Scalar, den: Scalar) -> Scalar:
    """``num / den`` keeping rationals exact; ``0`` when ``den`` is zero."""
    if den == 0:
        return Fraction(0) if not isinstance(num, float) else 0.0
    if isinstance(num, float) or isinstance(den, float):
        return num / den
    return Fraction(num) / Fraction(den)
