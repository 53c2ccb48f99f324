"""Almost squares near x: n = a*b with a, b close to sqrt(x).

Two routes are provided. ``brute_force_nearest`` scans every factor pair
in a window; ``d_search`` uses ab = D**2 - d**2 with D = (a+b)/2 and
d = (b-a)/2, so that finding a good n reduces to finding d for which
sqrt(x + d**2) is close to an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._parallel import chunk_range, parallel_map
from .exact import (
    FixedPoint,
    as_fraction,
    isqrt,
    nearest_sqrt_int,
    power_bounds,
    sqrt_fixed,
)

# digits used for fractional-window decisions in conditional_find
WINDOW_DIGITS = 30
# points this close to a window endpoint count as outside
WINDOW_GUARD = Fraction(1, 10**25)


class NoCandidate(LookupError):
    """No d in the scanned range produced a candidate."""


@dataclass(frozen=True)
class AlmostSquare:
    x: int
    a: int
    b: int
    n: int = field(init=False)
    offset: int = field(init=False)
    D: int | None = field(init=False)
    d: int | None = field(init=False)

    def __post_init__(self):
        if not 0 < self.a <= self.b:
            raise ValueError(f"need 0 < a <= b, got a={self.a}, b={self.b}")
        n = self.a * self.b
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "offset", abs(self.x - n))
        if (self.a - self.b) % 2 == 0:
            object.__setattr__(self, "D", (self.a + self.b) // 2)
            object.__setattr__(self, "d", (self.b - self.a) // 2)
        else:
            object.__setattr__(self, "D", None)
            object.__setattr__(self, "d", None)

    @classmethod
    def from_dd(cls, x: int, D: int, d: int) -> "AlmostSquare":
        return cls(x, D - d, D + d)

    def as_row(self) -> dict:
        return {"x": self.x, "a": self.a, "b": self.b, "n": self.n,
                "offset": self.offset, "D": self.D, "d": self.d}


@dataclass(frozen=True)
class SearchWindow:
    """Integer factor range [lo, hi] around sqrt(x) of radius c2 * x**theta."""

    x: int
    theta: Fraction
    c2: Fraction
    lo: int
    hi: int

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi


def _ceil_root_minus(x: int, r: Fraction) -> int:
    # smallest integer a with a >= sqrt(x) - r
    a = isqrt(x) - math.floor(r) - 2
    while not (a + r >= 0 and (a + r) ** 2 >= x):
        a += 1
    return a


def _floor_root_plus(x: int, r: Fraction) -> int:
    # largest integer b with b <= sqrt(x) + r
    b = isqrt(x) + math.ceil(r) + 2
    while not (b - r <= 0 or (b - r) ** 2 <= x):
        b -= 1
    return b


def window_radius(x: int, theta, c2) -> Fraction:
    """A rational lower bound for c2 * x**theta (exact when x**theta is rational)."""
    lo, _ = power_bounds(x, theta)
    return as_fraction(c2) * lo


def search_window(x: int, theta, c2) -> SearchWindow:
    """Factor window for target x.

    The radius is rounded inward, so a window can only shrink relative to
    the real one. ``lo`` is clamped to 1 since factors are positive.
    """
    theta, c2 = as_fraction(theta), as_fraction(c2)
    if not 0 <= theta < Fraction(1, 2):
        raise ValueError(f"theta must lie in [0, 1/2), got {theta}")
    if c2 <= 0:
        raise ValueError("c2 must be positive")
    if x < 1:
        raise ValueError("x must be positive")
    r = window_radius(x, theta, c2)
    lo = max(_ceil_root_minus(x, r), 1)
    hi = _floor_root_plus(x, r)
    if lo > hi:
        raise ValueError(f"empty window for x={x}, theta={theta}, c2={c2}")
    return SearchWindow(x, theta, c2, lo, hi)


def _pair_key(x, a, b):
    n = a * b
    return (abs(x - n), n, a)


def brute_force_nearest(x: int, w: SearchWindow) -> AlmostSquare:
    """Minimal |x - ab| over w.lo <= a <= b <= w.hi.

    For fixed a the offset is convex in b, so only the two integers
    around x/a (clamped to [a, hi]) need checking. Ties go to the smaller
    product, then the smaller a.
    """
    if w.lo < 1:
        raise ValueError("window must start at 1 or above")
    best = None
    for a in range(w.lo, w.hi + 1):
        q = x // a
        for b in {min(max(q, a), w.hi), min(max(q + 1, a), w.hi)}:
            key = _pair_key(x, a, b)
            if best is None or key < best[0]:
                best = (key, a, b)
    _, a, b = best
    return AlmostSquare(x, a, b)


def _d_candidates(x: int, d_lo: int, d_hi: int):
    for d in range(d_lo, d_hi + 1):
        D = nearest_sqrt_int(x + d * d)
        if D <= d:
            continue
        yield d, D


def _d_best(args):
    x, d_lo, d_hi = args
    best = None
    for d, D in _d_candidates(x, d_lo, d_hi):
        key = (abs(x - (D * D - d * d)), d)
        if best is None or key < best[0]:
            best = (key, D)
    return best


def d_search(x: int, d_lo: int, d_hi: int, workers: int = 1) -> AlmostSquare:
    """Best n = D**2 - d**2 over d in [d_lo, d_hi], D the integer nearest sqrt(x + d**2).

    Only pairs with b - a even are reachable this way. Values of d with
    D <= d give a non-positive factor and are skipped. Ties go to the
    smaller d; the result does not depend on ``workers``.
    """
    if d_lo < 0 or d_lo > d_hi:
        raise ValueError(f"bad d range [{d_lo}, {d_hi}]")
    chunks = [(x, lo, hi) for lo, hi in chunk_range(d_lo, d_hi, workers)]
    parts = [p for p in parallel_map(_d_best, chunks, workers) if p is not None]
    if not parts:
        raise NoCandidate(f"no admissible d in [{d_lo}, {d_hi}] for x={x}")
    (_, d), D = min(parts)
    return AlmostSquare.from_dd(x, D, d)


def _circle_dist(y: Fraction, centre: Fraction) -> Fraction:
    t = (y - centre) % 1
    return min(t, 1 - t)


def conditional_schedule(x: int, theta, eps):
    """(N, Delta) with N = floor(x**theta) and Delta a lower bound for x**-(theta - 2 eps)."""
    theta, eps = as_fraction(theta), as_fraction(eps)
    lo, hi = power_bounds(x, theta, WINDOW_DIGITS)
    N = math.floor(hi)
    if math.floor(lo) != N:
        # x**theta within 1e-30 of an integer; settle it exactly
        N = math.floor(lo) if _pow_lt(x, theta, math.floor(hi)) else N
    delta_lo, _ = power_bounds(x, -(theta - 2 * eps), WINDOW_DIGITS)
    return N, delta_lo


def _pow_lt(x, theta, k):
    # x**(p/q) < k  <=>  x**p < k**q  (theta >= 0)
    return x**theta.numerator < k**theta.denominator


def conditional_find(x: int, theta, eps) -> AlmostSquare:
    """Almost square from the smallest d <= floor(x**theta) with
    {d**2 / (2 sqrt x)} inside (lam - Delta, lam + Delta) mod 1, where
    lam = 1 - {sqrt x} and Delta = x**-(theta - 2 eps).

    Membership is decided at 30 digits; points within 1e-25 of an
    endpoint are rejected.
    """
    theta, eps = as_fraction(theta), as_fraction(eps)
    if not Fraction(1, 4) < theta < Fraction(1, 3):
        raise ValueError(f"theta must lie in (1/4, 1/3), got {theta}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    N, delta = conditional_schedule(x, theta, eps)
    # rational approximation of 1/x**(1-2 theta) must fit in half the window
    lhs_hi = power_bounds(x, -(1 - 2 * theta), WINDOW_DIGITS)[1]
    if lhs_hi > delta / 2:
        raise ValueError(
            f"eps={eps} too small for x={x}: 1/x^(1-2theta) > Delta/2")
    root = sqrt_fixed(x, WINDOW_DIGITS + 10).as_fraction()
    lam = (1 - root % 1) % 1
    radius = delta - WINDOW_GUARD
    for d in range(N + 1):
        y = Fraction(d * d) / (2 * root) % 1
        if _circle_dist(y, lam) < radius:
            D = nearest_sqrt_int(x + d * d)
            if D <= d:
                continue
            return AlmostSquare.from_dd(x, D, d)
    raise NoCandidate(f"no d <= {N} lands in the window for x={x}")


def taylor_error(x: int, d: int, digits: int) -> FixedPoint:
    """|sqrt(x + d**2) - sqrt(x) - d**2/(2 sqrt x)| to ``digits`` decimals."""
    if d * d >= x:
        raise ValueError("need d**2 < x")
    guard = digits + 10 + len(str(x))
    big = sqrt_fixed(x + d * d, guard).as_fraction()
    s = sqrt_fixed(x, guard).as_fraction()
    err = abs(big - s - Fraction(d * d) / (2 * s))
    return FixedPoint.from_fraction(err, digits)


def diff_of_squares_check(a: int, b: int) -> tuple[int, int]:
    """(s, t) = (a + b, b - a), with 4ab == s**2 - t**2 checked."""
    if a > b:
        raise ValueError("need a <= b")
    s, t = a + b, b - a
    if 4 * a * b != s * s - t * t:
        raise ArithmeticError("difference-of-squares identity failed")
    return s, t
