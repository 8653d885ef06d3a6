"""Exact rational helpers and radical thresholds.

Regularity levels such as ``eps**(1/4) * k**(2k)`` are usually irrational.
:class:`Root` stores them as ``radicand ** (1/degree)`` and compares against
rationals by raising both sides to the ``degree``-th power, so no verdict ever
depends on floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, an integer or a finite decimal into a Fraction."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(x: Number) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Root:
    """The nonnegative real ``radicand ** (1/degree)``."""

    radicand: Fraction
    degree: int = 1

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be positive")
        if self.radicand < 0:
            raise ValueError("radicand must be nonnegative")
        object.__setattr__(self, "radicand", Fraction(self.radicand))

    @classmethod
    def of(cls, x: "Number | Root") -> "Root":
        return x if isinstance(x, Root) else cls(Fraction(x), 1)

    def scaled(self, c: Number) -> "Root":
        """``c * self`` for a nonnegative rational ``c``."""
        c = Fraction(c)
        if c < 0:
            raise ValueError("scale must be nonnegative")
        return Root(self.radicand * c**self.degree, self.degree)

    def power(self, m: int) -> "Fraction | Root":
        """``self ** m``; rational when ``degree`` divides ``m``."""
        g = math.gcd(m, self.degree)
        base = self.radicand ** (m // g)
        if self.degree // g == 1:
            return base
        return Root(base, self.degree // g)

    def as_fraction(self) -> Fraction | None:
        """Exact rational value, or None if irrational."""
        r = self.radicand
        num = _integer_root(r.numerator, self.degree)
        den = _integer_root(r.denominator, self.degree)
        if num is None or den is None:
            return None
        return Fraction(num, den)

    def _cmp(self, other) -> int:
        if isinstance(other, Root):
            # x^(1/p) vs y^(1/q): compare x^q vs y^p
            lhs = self.radicand ** other.degree
            rhs = other.radicand ** self.degree
        else:
            other = Fraction(other)
            if other < 0:
                return 1
            lhs = self.radicand
            rhs = other**self.degree
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        if not isinstance(other, (Root, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        q = self.as_fraction()
        return hash(q) if q is not None else hash((self.radicand, self.degree))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __mul__(self, other):
        if isinstance(other, Root):
            d = self.degree * other.degree // math.gcd(self.degree, other.degree)
            return Root(
                self.radicand ** (d // self.degree) * other.radicand ** (d // other.degree), d
            )
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self):
        return float(self.radicand) ** (1.0 / self.degree)

    def __str__(self):
        q = self.as_fraction()
        if q is not None:
            return format_rational(q)
        return f"({format_rational(self.radicand)})^(1/{self.degree})"


Level = Union[Fraction, Root]


def as_level(x) -> Level:
    """Normalize an int/Fraction/str/Root into a Fraction or an irrational Root."""
    if isinstance(x, Root):
        q = x.as_fraction()
        return q if q is not None else x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def level_str(x: Level) -> str:
    return str(x) if isinstance(x, Root) else format_rational(x)


def ceil_times(level: Level, m: int) -> int:
    """Smallest integer ``t`` with ``t >= level * m`` (``m >= 0``)."""
    if isinstance(level, Root):
        t = max(0, math.floor(float(level) * m) - 1)
        while not (t >= level.scaled(m)):
            t += 1
        while t > 0 and (t - 1) >= level.scaled(m):
            t -= 1
        return t
    return math.ceil(Fraction(level) * m)


def _integer_root(n: int, d: int) -> int | None:
    if n < 0:
        return None
    if d == 1:
        return n
    r = round(n ** (1.0 / d)) if n < 2**1000 else _nth_root_floor(n, d)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**d == n:
            return c
    r = _nth_root_floor(n, d)
    return r if r**d == n else None


def _nth_root_floor(n: int, d: int) -> int:
    lo, hi = 0, 1 << (n.bit_length() // d + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**d <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo
