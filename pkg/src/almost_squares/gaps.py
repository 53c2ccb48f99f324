"""Desk-scale gap experiments.

Worst offsets over x-grids with exponent fits, the quarter-point
adversary for small windows, pigeonhole gaps between window products,
multiplication-table density, and sums of two squares.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._parallel import chunk_range, parallel_map
from .core import brute_force_nearest, d_search, search_window, window_radius
from .exact import FixedPoint, as_fraction, isqrt, nearest_sqrt_int, power_bounds, sqrt_fixed

log = logging.getLogger(__name__)

REPORT_DIGITS = 6
MULT_TABLE_LIMIT = 10**4
SIEVE_LIMIT = 10**8

# density exponent of the multiplication table: 1 - log(e log 2)/log 2
ERDOS_ALPHA = 1 - math.log(math.e * math.log(2)) / math.log(2)


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class GapRecord:
    x: int
    offset: int
    meta: str = ""


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    count: int


class QuarterCheck(NamedTuple):
    x: int
    min_offset: int
    bound: FixedPoint
    passed: bool


class ProductGap(NamedTuple):
    max_gap: int
    floor: FixedPoint
    passed: bool
    at: int
    products: int


class TwoSquaresNear(NamedTuple):
    D: int
    d: int
    offset: int

    @property
    def n(self):
        return self.D**2 + self.d**2


def log_grid(lo: int, hi: int, count: int) -> list[int]:
    """``count`` integers spaced logarithmically over [lo, hi], duplicates dropped."""
    if count == 1:
        return [lo]
    pts = np.unique(np.rint(np.geomspace(lo, hi, count)).astype(np.int64))
    return [int(v) for v in pts]


def _min_offset(x, theta, c2, method):
    w = search_window(x, theta, c2)
    if method == "brute":
        return brute_force_nearest(x, w).offset
    d_hi = math.floor(window_radius(x, theta, c2))
    return d_search(x, 0, d_hi).offset


def _scan_one(args):
    x, theta, c2, method, block = args
    worst = max(_min_offset(y, theta, c2, method) for y in range(x, x + block))
    meta = method if block == 1 else f"{method}/worst-of-{block}"
    return GapRecord(x, worst, meta)


def scan_worst_offset(xs, theta, c2, method="brute", workers=1, block=1) -> list[GapRecord]:
    """Per x, the smallest offset reachable in its window by ``method``.

    With ``block`` > 1 each record instead holds the worst such offset
    over x, x+1, ..., x+block-1, which is what exponent fits need: single
    points are dominated by lucky near-factorizations. Records come back
    ordered by x.
    """
    xs = sorted(xs)
    if not xs:
        raise ValueError("xs must be nonempty")
    if method not in ("brute", "dsearch"):
        raise ValueError(f"unknown method {method!r}")
    if block < 1:
        raise ValueError("block must be >= 1")
    theta, c2 = as_fraction(theta), as_fraction(c2)
    return parallel_map(_scan_one, [(x, theta, c2, method, block) for x in xs], workers)


def fit_exponent(records) -> ExponentFit:
    """Least-squares slope of log(offset) against log(x); zero offsets are dropped."""
    pts = [(r.x, r.offset) for r in records if r.offset >= 1]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise InsufficientData("need two records with offset >= 1 at distinct x")
    lx = np.log([float(x) for x, _ in pts])
    ly = np.log([float(o) for _, o in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    return ExponentFit(float(slope), float(intercept), len(pts))


def quarter_point(k: int) -> int:
    """Integer nearest (k + 1/4)**2."""
    return math.floor(Fraction(4 * k + 1, 4) ** 2 + Fraction(1, 2))


def quarter_point_check(k: int, theta, c2) -> QuarterCheck:
    """Brute-force minimal offset at x ~ (k + 1/4)**2 against
    sqrt(x)/4 - c2**2 x**(2 theta) - 1."""
    theta, c2 = as_fraction(theta), as_fraction(c2)
    if theta >= Fraction(1, 4):
        raise ValueError("theta must be below 1/4")
    x = quarter_point(k)
    res = brute_force_nearest(x, search_window(x, theta, c2))
    root = sqrt_fixed(x, 30)
    root_hi = root.as_fraction() + root.error_bound
    p_lo, _ = power_bounds(x, 2 * theta)
    bound_hi = root_hi / 4 - c2 * c2 * p_lo - 1
    bound = FixedPoint.from_fraction(bound_hi, REPORT_DIGITS)
    return QuarterCheck(x, res.offset, bound, res.offset >= bound_hi)


def product_gap(x: int, theta, c) -> ProductGap:
    """Largest gap between consecutive window products a*b that meets
    [x - c x**(1/2 + theta), x].

    The nearest products just outside the interval close off the end
    gaps; an interval end is used only when no product lies beyond it.
    """
    theta, c = as_fraction(theta), as_fraction(c)
    w = search_window(x, theta, c)
    span_lo, _ = power_bounds(x, Fraction(1, 2) + theta)
    left = math.ceil(x - c * span_lo)
    a = np.arange(w.lo, w.hi + 1, dtype=object)
    allp = np.unique(np.outer(a, a).ravel())
    inside = [int(v) for v in allp if left <= v <= x]
    below = [int(v) for v in allp if v < left]
    above = [int(v) for v in allp if v > x]
    pts = ([below[-1]] if below else [left]) + inside + ([above[0]] if above else [x])
    pts = sorted(set(pts))
    diffs = np.diff(np.array(pts, dtype=object))
    i = int(np.argmax(diffs))
    gap = int(diffs[i])
    _, p_hi = power_bounds(x, Fraction(1, 2) - theta)
    floor_hi = p_hi / (4 * c)
    return ProductGap(gap, FixedPoint.from_fraction(floor_hi, REPORT_DIGITS),
                      gap >= floor_hi, pts[i], len(inside))


def mult_table_count(n: int, limit: int = MULT_TABLE_LIMIT) -> int:
    """Number of distinct a*b with 1 <= a, b <= n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > limit:
        raise ValueError(f"n={n} exceeds the configured limit {limit}")
    seen = np.zeros(n * n + 1, dtype=bool)
    row = np.arange(1, n + 1, dtype=np.int64)
    for a in range(1, n + 1):
        seen[a * row[a - 1:]] = True
    return int(seen.sum())


def _sieve_segment(args):
    lo, hi = args
    seg = np.zeros(hi - lo + 1, dtype=bool)
    for u in range(isqrt(hi) + 1):
        rest_lo = max(lo - u * u, 0)
        v0 = max(isqrt(rest_lo - 1) + 1 if rest_lo else 0, u)
        v1 = isqrt(hi - u * u)
        if v0 > v1:
            continue
        v = np.arange(v0, v1 + 1, dtype=np.int64)
        seg[u * u + v * v - lo] = True
    return seg


def two_squares_sieve(limit: int, workers: int = 1, max_limit: int = SIEVE_LIMIT) -> np.ndarray:
    """Boolean array s of length limit + 1 with s[m] iff m = u**2 + v**2."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit > max_limit:
        raise ValueError(f"limit {limit} exceeds the sieve bound {max_limit}")
    parts = list(chunk_range(0, limit, workers))
    return np.concatenate(parallel_map(_sieve_segment, parts, workers))


def is_sum_of_two_squares(m: int) -> bool:
    """Factorization test: every prime 3 mod 4 divides m to an even power."""
    if m < 0:
        return False
    if m == 0:
        return True
    while m % 2 == 0:
        m //= 2
    p = 3
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if p % 4 == 3 and e % 2:
            return False
        p += 2
    return m % 4 != 3


def two_squares_by_factorization(limit: int) -> np.ndarray:
    """Same bitmap as ``two_squares_sieve``, built from smallest prime factors."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            blk = spf[p * p::p]
            blk[blk == 0] = p
    out = np.zeros(limit + 1, dtype=bool)
    out[0] = True
    spf = spf.tolist()
    for m in range(1, limit + 1):
        r, ok = m, True
        while r > 1:
            p = spf[r] or r
            e = 0
            while r % p == 0:
                r //= p
                e += 1
            if p % 4 == 3 and e % 2:
                ok = False
                break
        out[m] = ok
    return out


def two_squares_near(x: int, d_max: int) -> TwoSquaresNear:
    """Closest D**2 + d**2 to x over d <= d_max, D nearest sqrt(x - d**2)."""
    if d_max < 0 or d_max * d_max >= x:
        raise ValueError("need 0 <= d_max and d_max**2 < x")
    best = None
    for d in range(d_max + 1):
        D = nearest_sqrt_int(x - d * d)
        key = (abs(x - D * D - d * d), d)
        if best is None or key < best[0]:
            best = (key, D)
    (off, d), D = best
    return TwoSquaresNear(D, d, off)


def max_gap_two_squares(lo: int, hi: int, sieve: np.ndarray | None = None) -> tuple[int, int]:
    """(gap, left end) of the widest step between consecutive sums of two
    squares in [lo, hi]; the earliest one wins ties."""
    if lo > hi:
        raise ValueError("need lo <= hi")
    if sieve is None:
        sieve = two_squares_sieve(hi)
    elif len(sieve) <= hi:
        raise ValueError("sieve does not reach hi")
    marked = np.flatnonzero(sieve[lo:hi + 1]) + lo
    if len(marked) < 2:
        raise InsufficientData(f"fewer than two sums of two squares in [{lo}, {hi}]")
    diffs = np.diff(marked)
    i = int(np.argmax(diffs))
    return int(diffs[i]), int(marked[i])
