"""Exact arithmetic over Q and over the Eisenstein field Q(w), w = exp(2*pi*i/3).

Rationals are :class:`fractions.Fraction`, which is always stored in lowest
terms with a positive denominator, so equality is structural.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction
Scalar = Union[int, Fraction, "Eisenstein"]


def to_rational(x: int | Fraction | str) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string into a Fraction; floats are rejected."""
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact value {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                p, q = s.split("/")
                return Fraction(int(p), int(q))
            return Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {x!r}") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Eisenstein:
    """The number ``a + b*w`` with rational ``a``, ``b`` and ``w**2 + w + 1 = 0``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", to_rational(self.a))
        object.__setattr__(self, "b", to_rational(self.b))

    @classmethod
    def coerce(cls, x: Scalar) -> Eisenstein:
        if isinstance(x, Eisenstein):
            return x
        return cls(to_rational(x), Fraction(0))

    def __add__(self, other: Scalar) -> Eisenstein:
        o = Eisenstein.coerce(other)
        return Eisenstein(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> Eisenstein:
        return Eisenstein(-self.a, -self.b)

    def __sub__(self, other: Scalar) -> Eisenstein:
        return self + (-Eisenstein.coerce(other))

    def __rsub__(self, other: Scalar) -> Eisenstein:
        return Eisenstein.coerce(other) - self

    def __mul__(self, other: Scalar) -> Eisenstein:
        o = Eisenstein.coerce(other)
        # w**2 = -1 - w
        bb = self.b * o.b
        return Eisenstein(self.a * o.a - bb, self.a * o.b + o.a * self.b - bb)

    __rmul__ = __mul__

    def conjugate(self) -> Eisenstein:
        # conj(w) = w**2 = -1 - w
        return Eisenstein(self.a - self.b, -self.b)

    def norm_squared(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def inverse(self) -> Eisenstein:
        n = self.norm_squared()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(w)")
        c = self.conjugate()
        return Eisenstein(c.a / n, c.b / n)

    def __truediv__(self, other: Scalar) -> Eisenstein:
        return self * Eisenstein.coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> Eisenstein:
        return Eisenstein.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> Eisenstein:
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Eisenstein):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_real(self) -> bool:
        return self.b == 0

    def real_part(self) -> Fraction:
        """Exact rational value of a real element; raises if the element is not real."""
        if self.b != 0:
            raise ValueError(f"{self} is not real")
        return self.a

    def to_complex(self) -> complex:
        """Floating projection, for display only."""
        return float(self.a) + float(self.b) * cmath.exp(2j * cmath.pi / 3)

    def to_json(self) -> dict[str, str]:
        return {"a": format_rational(self.a), "b": format_rational(self.b)}

    @classmethod
    def from_json(cls, obj: dict[str, str]) -> Eisenstein:
        if not isinstance(obj, dict) or set(obj) != {"a", "b"}:
            raise ValueError(f"expected {{'a': 'p/q', 'b': 'p/q'}}, got {obj!r}")
        return cls(to_rational(obj["a"]), to_rational(obj["b"]))

    def __repr__(self) -> str:
        return f"Eisenstein({self.a}, {self.b})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}w"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}w"


ZERO = Eisenstein(0, 0)
ONE = Eisenstein(1, 0)
OMEGA = Eisenstein(0, 1)
OMEGA2 = OMEGA * OMEGA
