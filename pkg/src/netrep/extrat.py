"""Extended rationals: exact ``Fraction`` values plus a symbolic ``+inf``.

No floating point is used anywhere.  ``INF`` absorbs addition, compares
greater than every rational and never equals one.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union


class _PosInf:
    __slots__ = ()

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_get_inf, ())

    def __hash__(self):
        return hash("netrep.INF")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Rational):
            return self
        if other is self:
            raise ArithmeticError("inf - inf is undefined")
        return NotImplemented

    def __rsub__(self, other):
        raise ArithmeticError("no negative infinity in extended rationals")

    def __neg__(self):
        raise ArithmeticError("no negative infinity in extended rationals")


INF = _PosInf()


def _get_inf():
    return INF


ExtRat = Union[Fraction, _PosInf]


def is_inf(value) -> bool:
    return value is INF


def to_extrat(value) -> ExtRat:
    """Coerce ints, Fractions, ``INF`` and strings ("3/2", "inf") to an ExtRat."""
    if value is INF:
        return INF
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use Fraction or 'p/q'")
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "+inf", "∞", "+∞"):
            return INF
        return Fraction(text)
    if isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an extended rational")


def format_extrat(value: ExtRat) -> str:
    if value is INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def scale(alpha: Fraction, value: ExtRat) -> ExtRat:
    """``alpha * value`` for ``alpha >= 0``; infinity stays infinite (also for alpha = 0)."""
    if value is INF:
        return INF
    return alpha * value
