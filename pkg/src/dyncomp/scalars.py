"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Every coordinate handled by the library is an ExactScalar (a + b*sqrt(D))/c
with arbitrary-precision integers.  All comparisons reduce to integer sign
tests, so ordering, region algebra and extrema downstream are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


def _squarefree(d: int) -> tuple[int, int]:
    """Return (s, d') with d = s^2 * d' and d' square-free."""
    s = 1
    f = 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            s *= f
        f += 1
    return s, d


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


@total_ordering
class ExactScalar:
    """(a + b*sqrt(D))/c with gcd(a, b, c) = 1, c > 0, D square-free.

    Pure rationals are normalized to b = 0, D = 1 so they mix freely with
    scalars from any field; two irrational operands must share D.
    """

    __slots__ = ("a", "b", "c", "D")

    def __init__(self, a: int, b: int = 0, c: int = 1, D: int = 1):
        if c == 0:
            raise ZeroDivisionError("scalar denominator is zero")
        if D <= 0:
            raise ValueError("D must be positive")
        if c < 0:
            a, b, c = -a, -b, -c
        if b != 0 and D != 1:
            s, d0 = _squarefree(D)
            b *= s
            D = d0
        if D == 1:
            a, b = a + b, 0
        if b == 0:
            D = 1
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "D", D)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def rational(cls, p, q: int = 1) -> "ExactScalar":
        if isinstance(p, Fraction):
            return cls(p.numerator, 0, p.denominator * q)
        return cls(p, 0, q)

    @classmethod
    def coerce(cls, x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, Fraction):
            return cls(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError("irrational scalar has no Fraction form")
        return Fraction(self.a, self.c)

    def _join(self, other: "ExactScalar") -> int:
        """Common D for a binary operation; mixing two fields is an error."""
        if self.b == 0:
            return other.D
        if other.b == 0:
            return self.D
        if self.D != other.D:
            raise ValueError(f"incompatible quadratic fields D={self.D}, D={other.D}")
        return self.D

    def sign(self) -> int:
        """Sign of the value, decided by integer arithmetic only."""
        a, b, D = self.a, self.b, self.D
        if b == 0:
            return _sign(a)
        if a == 0:
            return _sign(b)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        t = _sign(a * a - b * b * D)
        return t if a > 0 else -t

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __eq__(self, other) -> bool:
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.c, self.D) == (other.a, other.b, other.c, other.D)

    def __lt__(self, other) -> bool:
        other = ExactScalar.coerce(other)
        return (self - other).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.D))

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.a, -self.b, self.c, self.D)

    def __abs__(self) -> "ExactScalar":
        return -self if self.sign() < 0 else self

    def __add__(self, other) -> "ExactScalar":
        other = ExactScalar.coerce(other)
        D = self._join(other)
        return ExactScalar(
            self.a * other.c + other.a * self.c,
            self.b * other.c + other.b * self.c,
            self.c * other.c,
            D,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "ExactScalar":
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other) -> "ExactScalar":
        return ExactScalar.coerce(other) + (-self)

    def __mul__(self, other) -> "ExactScalar":
        other = ExactScalar.coerce(other)
        D = self._join(other)
        return ExactScalar(
            self.a * other.a + self.b * other.b * D,
            self.a * other.b + self.b * other.a,
            self.c * other.c,
            D,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        other = ExactScalar.coerce(other)
        if other.sign() == 0:
            raise ZeroDivisionError("division by zero scalar")
        D = self._join(other)
        # multiply by the conjugate: 1/((a+b*sqrt(D))/c) = c(a-b*sqrt(D))/(a^2-b^2 D)
        n = other.a * other.a - other.b * other.b * D
        return ExactScalar(
            (self.a * other.a - self.b * other.b * D) * other.c,
            (self.b * other.a - self.a * other.b) * other.c,
            self.c * n,
            D,
        )

    def __rtruediv__(self, other) -> "ExactScalar":
        return ExactScalar.coerce(other) / self

    def floor(self) -> int:
        a, b, c, D = self.a, self.b, self.c, self.D
        if b == 0:
            return a // c
        s = math.isqrt(b * b * D)
        n = (a + (s if b > 0 else -s - 1)) // c
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def frac(self) -> "ExactScalar":
        """Fractional part, the representative in [0, 1)."""
        return self - self.floor()

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.D)) / self.c

    def __repr__(self) -> str:
        if self.b == 0:
            return f"ExactScalar({self.a}/{self.c})"
        return f"ExactScalar(({self.a}+{self.b}*sqrt({self.D}))/{self.c})"

    def __str__(self) -> str:
        if self.b == 0:
            return f"{self.a}/{self.c}"
        return f"({self.a}+{self.b}*sqrt({self.D}))/{self.c}"


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
HALF = ExactScalar(1, 0, 2)


def golden_theta() -> ExactScalar:
    """The angle (-1 + sqrt(5))/2 of the golden rotation."""
    return ExactScalar(-1, 1, 2, 5)
