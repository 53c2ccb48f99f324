import decimal
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from almost_squares.core import (
    AlmostSquare,
    NoCandidate,
    brute_force_nearest,
    conditional_find,
    conditional_schedule,
    d_search,
    diff_of_squares_check,
    search_window,
    taylor_error,
    window_radius,
)
from almost_squares.exact import nearest_sqrt_int


def exhaustive(x, lo, hi):
    """Every pair lo <= a <= b <= hi, ordered by (offset, n, a)."""
    return min((abs(x - a * b), a * b, a, b)
               for a in range(lo, hi + 1) for b in range(a, hi + 1))


def hp_frac(v):
    return v - v.to_integral_value(decimal.ROUND_FLOOR)


# windows -------------------------------------------------------------------------

@pytest.mark.parametrize("x,theta,c2,lo,hi", [
    (10**6, Fraction(1, 4), 2, 937, 1063),
    (10**6, 0, 1, 999, 1001),
    (1000, Fraction(1, 4), 2, 21, 42),
])
def test_search_window_examples(x, theta, c2, lo, hi):
    w = search_window(x, theta, c2)
    assert (w.lo, w.hi) == (lo, hi)


def test_search_window_examples_by_direct_evaluation():
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        for x, lo, hi in [(10**6, 937, 1063), (1000, 21, 42)]:
            r = decimal.Decimal(x).sqrt()
            rad = 2 * decimal.Decimal(x) ** decimal.Decimal("0.25")
            assert lo == int((r - rad).to_integral_value(decimal.ROUND_CEILING))
            assert hi == int((r + rad).to_integral_value(decimal.ROUND_FLOOR))


def test_search_window_rejects_bad_theta():
    with pytest.raises(ValueError):
        search_window(1000, Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        search_window(1000, Fraction(1, 4), 0)


def test_search_window_exact_radius_boundaries():
    # x^(1/2) exact: radius 1000 puts both ends on integers that must be included
    w = search_window(10**6, Fraction(1, 2) - Fraction(1, 10**9), 1)
    assert w.hi >= 1000
    w = search_window(10**6, 0, 3)
    assert (w.lo, w.hi) == (997, 1003)


@given(st.integers(1, 10**9), st.fractions(0, Fraction(12, 25), max_denominator=50),
       st.fractions(Fraction(1, 10), 5, max_denominator=20))
@settings(max_examples=150, deadline=None)
def test_search_window_bounds_are_exact(x, theta, c2):
    try:
        w = search_window(x, theta, c2)
    except ValueError:
        # radius too small: no integer k with |k - sqrt x| <= r
        r = window_radius(x, theta, c2)
        for k in (math.isqrt(x), math.isqrt(x) + 1):
            reaches_up = (k + r) ** 2 >= x
            reaches_down = k - r <= 0 or (k - r) ** 2 <= x
            assert not (reaches_up and reaches_down)
        return
    r = window_radius(x, theta, c2)
    # lo - 1 falls short, lo reaches; hi reaches, hi + 1 overshoots
    if w.lo > 1:
        assert (w.lo + r) ** 2 >= x and ((w.lo - 1) + r < 0 or ((w.lo - 1) + r) ** 2 < x)
    assert w.hi - r <= 0 or (w.hi - r) ** 2 <= x
    assert (w.hi + 1 - r) > 0 and (w.hi + 1 - r) ** 2 > x


# brute force -----------------------------------------------------------------------

def test_brute_examples():
    w = search_window(1000, Fraction(1, 4), 2)
    r = brute_force_nearest(1000, w)
    assert (r.a, r.b, r.n, r.offset) == (25, 40, 1000, 0)
    r = brute_force_nearest(997, w)
    assert (r.a, r.b, r.n, r.offset) == (27, 37, 999, 2)
    assert exhaustive(997, 21, 42) == (2, 999, 27, 37)


@pytest.mark.parametrize("k", [5, 17, 1000, 12345])
def test_brute_perfect_square(k):
    w = search_window(k * k, 0, 1)
    assert (w.lo, w.hi) == (k - 1, k + 1)
    r = brute_force_nearest(k * k, w)
    assert (r.a, r.b, r.offset) == (k, k, 0)


def test_brute_matches_exhaustive_oracle():
    rng = random.Random(42)
    for _ in range(300):
        x = rng.randrange(2, 10**6)
        w = search_window(x, Fraction(1, 4), Fraction(rng.randint(1, 8), 2))
        r = brute_force_nearest(x, w)
        assert (r.offset, r.n, r.a, r.b) == exhaustive(x, w.lo, w.hi)


# d-search ------------------------------------------------------------------------

def test_d_search_examples():
    r = d_search(10**6, 0, 63)
    assert (r.d, r.D, r.offset) == (0, 1000, 0)
    r = d_search(997, 0, 5)
    assert (r.d, r.D, r.n, r.offset) == (5, 32, 999, 2)
    r = d_search(26, 0, 0)
    assert (r.d, r.D, r.n, r.offset) == (0, 5, 25, 1)


def test_d_search_offsets_for_997_by_enumeration():
    offs = [abs(997 - (nearest_sqrt_int(997 + d * d) ** 2 - d * d)) for d in range(6)]
    assert offs == [27, 26, 23, 18, 11, 2]


def test_d_search_skips_degenerate():
    # x = 1: d = 1 gives D = 1 <= d
    r = d_search(1, 0, 3)
    assert r.d == 0 and r.a == 1
    with pytest.raises(NoCandidate):
        d_search(1, 1, 1)
    with pytest.raises(ValueError):
        d_search(10, 5, 4)


@pytest.mark.parametrize("workers", [1, 2, 3])
def test_d_search_worker_independent(workers):
    rng = random.Random(7)
    for _ in range(20):
        x = rng.randrange(10**4, 10**9)
        one = d_search(x, 0, 300)
        assert d_search(x, 0, 300, workers=workers) == one


def test_d_search_tie_prefers_smaller_d():
    for x in range(2, 400):
        r = d_search(x, 0, 6)
        cands = []
        for d in range(7):
            D = nearest_sqrt_int(x + d * d)
            if D > d:
                cands.append((abs(x - D * D + d * d), d))
        assert (r.offset, r.d) == min(cands)


def test_oracle_dominance_small():
    rng = random.Random(3)
    for _ in range(100):
        x = rng.randrange(10**4, 10**6)
        w = search_window(x, Fraction(1, 4), 2)
        d_hi = (w.hi - w.lo) // 4
        for d in range(d_hi + 1):
            D = nearest_sqrt_int(x + d * d)
            assert D - d in w and D + d in w
        assert brute_force_nearest(x, w).offset <= d_search(x, 0, d_hi).offset


def test_d_search_quarter_exponent_bound():
    rng = random.Random(11)
    for _ in range(100):
        x = rng.randrange(10**4, 10**9)
        d_hi = int(2 * x**0.25)
        assert d_search(x, 0, d_hi).offset <= 10 * x**0.25


# conditional construction ---------------------------------------------------------

def test_conditional_perfect_square():
    r = conditional_find(10**6, 0.28, 0.01)
    assert (r.d, r.offset) == (0, 0)
    r = conditional_find(10**4, 0.29, 0.01)
    assert r.offset == 0


def test_conditional_997():
    r = conditional_find(997, 0.3, 0.01)
    assert (r.d, r.D, r.n, r.offset) == (5, 32, 999, 2)


def test_conditional_997_by_high_precision_scan():
    N, delta = conditional_schedule(997, Fraction(3, 10), Fraction(1, 100))
    assert N == 7
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        D = decimal.Decimal
        root = D(997).sqrt()
        lam = hp_frac(1 - hp_frac(root))
        dl = D(997) ** D("-0.28")
        assert abs(float(dl) - float(delta)) < 1e-25
        assert abs(float(lam) - 0.4247) < 1e-4 and abs(float(dl) - 0.1447) < 1e-4
        hits = []
        for d in range(N + 1):
            y = hp_frac(D(d * d) / (2 * root))
            t = hp_frac(y - lam)
            if min(t, 1 - t) < dl:
                hits.append(d)
        assert hits[0] == 5
        assert abs(float(hp_frac(D(25) / (2 * root))) - 0.3959) < 1e-4


def test_conditional_rejects_bad_theta_and_eps():
    with pytest.raises(ValueError):
        conditional_find(997, 0.25, 0.01)
    with pytest.raises(ValueError):
        conditional_find(997, 0.34, 0.01)
    # 1/x^(1 - 2 theta) = 0.0955 exceeds Delta/2 = 0.0587
    with pytest.raises(ValueError):
        conditional_find(1000, Fraction(33, 100), Fraction(1, 100))


def test_conditional_offset_scale():
    rng = random.Random(5)
    found = 0
    for _ in range(60):
        x = rng.randrange(10**5, 10**9)
        theta, eps = Fraction(29, 100), Fraction(1, 100)
        try:
            r = conditional_find(x, theta, eps)
        except NoCandidate:
            continue
        found += 1
        assert r.offset <= 10 * x ** (0.5 - 0.29 + 0.01)
    assert found > 0


# taylor & identity ------------------------------------------------------------------

def test_taylor_examples():
    e = taylor_error(10**8, 100, 8)
    assert abs(float(e) - 1.25e-5) < 1e-7 and float(e) <= 1e-4
    e = taylor_error(10**6, 10, 8)
    assert abs(float(e) - 1.25e-6) < 1e-8 and float(e) <= 1e-5
    assert float(taylor_error(12345, 0, 10)) == 0


def test_taylor_against_decimal_oracle():
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        D = decimal.Decimal
        for x, d in [(10**8, 100), (10**6, 10), (987654321, 333)]:
            s = D(x).sqrt()
            want = abs(D(x + d * d).sqrt() - s - D(d * d) / (2 * s))
            got = taylor_error(x, d, 20)
            assert abs(got.as_fraction() - Fraction(want)) < Fraction(1, 10**19)


def test_taylor_error_below_quartic_term():
    rng = random.Random(1)
    for _ in range(200):
        x = rng.randrange(10**3, 10**12)
        d = rng.randrange(0, int(x**0.3) + 1)
        err = taylor_error(x, d, 30).as_fraction()
        # d^4 / x^(3/2) <= bound  <=>  d^8 <= bound^2 x^3
        assert err**2 * x**3 <= Fraction(d**8) + Fraction(1, 10**20)


def test_taylor_rejects_large_d():
    with pytest.raises(ValueError):
        taylor_error(100, 10, 5)


@pytest.mark.parametrize("a,b,s,t", [(25, 40, 65, 15), (27, 37, 64, 10), (3, 3, 6, 0)])
def test_diff_of_squares_examples(a, b, s, t):
    assert diff_of_squares_check(a, b) == (s, t)
    assert 4 * a * b == s * s - t * t


def test_diff_of_squares_random_pairs():
    rng = random.Random(42)
    for _ in range(10**4):
        a = rng.randrange(0, 10**30)
        b = a + rng.randrange(0, 10**30)
        s, t = diff_of_squares_check(a, b)
        assert 4 * a * b == s * s - t * t


def test_almost_square_record():
    r = AlmostSquare(997, 27, 37)
    assert (r.n, r.offset, r.D, r.d) == (999, 2, 32, 5)
    assert r.n == r.D**2 - r.d**2
    r = AlmostSquare(1000, 25, 40)
    assert r.D is None and r.d is None
    with pytest.raises(ValueError):
        AlmostSquare(10, 5, 2)
