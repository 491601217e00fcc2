"""Closed intervals with exact rational endpoints."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, ceil


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> RationalInterval:
        v = _frac(v)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, v) -> bool:
        if isinstance(v, RationalInterval):
            return self.lo <= v.lo and v.hi <= self.hi
        return self.lo <= v <= self.hi

    def subset_of(self, lo, hi) -> bool:
        return lo <= self.lo and self.hi <= hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    @staticmethod
    def _wrap(other) -> RationalInterval:
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __add__(self, other) -> RationalInterval:
        o = self._wrap(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> RationalInterval:
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> RationalInterval:
        return self + (-self._wrap(other))

    def __rsub__(self, other) -> RationalInterval:
        return self._wrap(other) - self

    def __mul__(self, other) -> RationalInterval:
        o = self._wrap(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> RationalInterval:
        if self.contains_zero():
            raise ZeroDivisionError(f"interval {self} contains 0")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> RationalInterval:
        return self * self._wrap(other).reciprocal()

    def __rtruediv__(self, other) -> RationalInterval:
        return self._wrap(other) * self.reciprocal()

    def hull(self, other) -> RationalInterval:
        o = self._wrap(other)
        return RationalInterval(min(self.lo, o.lo), max(self.hi, o.hi))

    def round_out(self, bits: int) -> RationalInterval:
        """Widen to endpoints with denominator ``2**bits``."""
        s = 1 << bits
        return RationalInterval(
            Fraction(floor(self.lo * s), s), Fraction(ceil(self.hi * s), s)
        )

    def decimal(self, digits: int) -> tuple[str, str]:
        """Endpoints as decimals, rounded outward to ``digits`` places."""
        return _decimal(self.lo, digits, floor), _decimal(self.hi, digits, ceil)

    def __str__(self) -> str:
        lo, hi = self.decimal(20)
        return f"[{lo}, {hi}]"


def _decimal(v: Fraction, digits: int, rnd) -> str:
    s = 10**digits
    q = rnd(v * s)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, frac = divmod(q, s)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"
