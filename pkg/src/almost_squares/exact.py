"""Exact integer kernels.

Every decision about how close a square root sits to an integer is made
here with integer comparisons. ``FixedPoint`` exists for reporting only.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction


def as_fraction(v) -> Fraction:
    """Coerce ints, Fractions, decimal strings and floats to a Fraction.

    Floats are read through their shortest repr, so ``0.1`` means 1/10
    rather than the nearest binary double.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r}")
        return Fraction(repr(v))
    if isinstance(v, decimal.Decimal):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class FixedPoint:
    """mantissa * 10**-scale, within 10**-scale of the quantity it reports."""

    mantissa: int
    scale: int

    def __str__(self):
        sign = "-" if self.mantissa < 0 else ""
        digits = str(abs(self.mantissa)).rjust(self.scale + 1, "0")
        if self.scale == 0:
            return sign + digits
        return f"{sign}{digits[:-self.scale]}.{digits[-self.scale:]}"

    def __float__(self):
        return self.mantissa / 10**self.scale

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 10**self.scale)

    @property
    def error_bound(self) -> Fraction:
        return Fraction(1, 10**self.scale)

    @classmethod
    def from_fraction(cls, v: Fraction, scale: int) -> "FixedPoint":
        """Round an exact rational to ``scale`` digits (half away from zero)."""
        v = Fraction(v) * 10**scale
        m = math.floor(abs(v) + Fraction(1, 2))
        return cls(m if v >= 0 else -m, scale)


def isqrt(m: int) -> int:
    """Largest s with s*s <= m."""
    if m < 0:
        raise ValueError("isqrt of a negative number")
    return math.isqrt(m)


def is_square(m: int) -> bool:
    return m >= 0 and math.isqrt(m) ** 2 == m


def nearest_sqrt_int(m: int) -> int:
    """The integer D closest to sqrt(m).

    With s = isqrt(m), sqrt(m) < s + 1/2 iff 4m < (2s+1)**2. Equality
    would need an odd square divisible by 4, so ties never happen.
    """
    s = isqrt(m)
    lhs, rhs = 4 * m, (2 * s + 1) ** 2
    assert lhs != rhs
    return s if lhs < rhs else s + 1


def sqrt_dist_lt(m: int, num: int, den: int) -> bool:
    """Decide ||sqrt(m)|| < num/den exactly."""
    if den <= 0 or num < 0:
        raise ValueError("need num >= 0 and den > 0")
    if 2 * num >= den:
        raise ValueError("threshold must be below 1/2")
    D = nearest_sqrt_int(m)
    lhs = m * den * den
    if m >= D * D:
        # root at or above D: sqrt(m) - D < num/den
        return lhs < (D * den + num) ** 2
    # D >= 1 here and D*den - num > 0 since num/den < 1/2
    return lhs > (D * den - num) ** 2


def sqrt_fixed(m: int, digits: int) -> FixedPoint:
    if digits < 1:
        raise ValueError("digits must be >= 1")
    return FixedPoint(nearest_sqrt_int(m * 10 ** (2 * digits)), digits)


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def exact_power(x: int, theta) -> Fraction | None:
    """x**theta when it is rational (theta = p/q and x**|p| a perfect q-th power)."""
    theta = as_fraction(theta)
    p, q = abs(theta.numerator), theta.denominator
    base = x**p
    r = _iroot(base, q)
    if r**q != base:
        return None
    return Fraction(r) if theta >= 0 else Fraction(1, r)


def _small(theta: Fraction) -> bool:
    return abs(theta.numerator) < 64 and theta.denominator < 64


def fixed_power(x: int, theta, digits: int = 30) -> FixedPoint:
    """x**theta to ``digits`` decimals, error below 10**-digits."""
    if x <= 0:
        raise ValueError("x must be positive")
    theta = as_fraction(theta)
    ex = exact_power(x, theta) if _small(theta) else None
    if ex is not None:
        return FixedPoint.from_fraction(ex, digits)
    mag = len(str(x)) * (abs(theta.numerator) // theta.denominator + 1)
    with decimal.localcontext() as ctx:
        ctx.prec = digits + mag + 20
        t = decimal.Decimal(theta.numerator) / decimal.Decimal(theta.denominator)
        v = decimal.Decimal(x) ** t
        return FixedPoint.from_fraction(Fraction(v), digits)


def power_bounds(x: int, theta, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Rational (lo, hi) with lo <= x**theta <= hi; lo == hi when exact."""
    theta = as_fraction(theta)
    ex = exact_power(x, theta) if _small(theta) else None
    if ex is not None:
        return ex, ex
    v = fixed_power(x, theta, digits)
    c, e = v.as_fraction(), v.error_bound
    return c - e, c + e


def jacobi(h: int, q: int) -> int:
    """Jacobi symbol (h/q) for odd q >= 1."""
    if q < 1 or q % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive q, got {q}")
    h %= q
    acc = 1
    while h:
        while h % 2 == 0:
            h //= 2
            if q % 8 in (3, 5):
                acc = -acc
        h, q = q, h
        if h % 4 == 3 and q % 4 == 3:
            acc = -acc
        h %= q
    return acc if q == 1 else 0


def mod_inverse(h: int, q: int) -> int:
    """h^-1 mod q as a value in [1, q)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(h, q) != 1:
        raise ValueError(f"{h} is not invertible mod {q}")
    return pow(h, -1, q)
