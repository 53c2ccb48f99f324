import math
from fractions import Fraction

import numpy as np
import pytest

from almost_squares.gaps import (
    ERDOS_ALPHA,
    GapRecord,
    InsufficientData,
    fit_exponent,
    is_sum_of_two_squares,
    log_grid,
    max_gap_two_squares,
    mult_table_count,
    product_gap,
    quarter_point,
    quarter_point_check,
    scan_worst_offset,
    two_squares_by_factorization,
    two_squares_near,
    two_squares_sieve,
)


# scans and fits --------------------------------------------------------------------

def test_scan_examples():
    assert scan_worst_offset([10**6], Fraction(1, 4), 2, "brute")[0].offset == 0
    assert scan_worst_offset([997], Fraction(1, 4), 2, "brute")[0].offset == 2
    squares = [k * k for k in range(100, 201)]
    for method in ("brute", "dsearch"):
        assert all(r.offset == 0 for r in scan_worst_offset(squares, Fraction(1, 4), 2, method))


def test_scan_order_and_workers():
    xs = [5000, 123456, 10**4, 777777]
    one = scan_worst_offset(xs, Fraction(1, 4), 2, "dsearch")
    assert [r.x for r in one] == sorted(xs)
    assert scan_worst_offset(xs, Fraction(1, 4), 2, "dsearch", workers=3) == one


def test_scan_block_is_worst_of_singles():
    singles = scan_worst_offset(range(20000, 20010), Fraction(1, 4), 2)
    blk = scan_worst_offset([20000], Fraction(1, 4), 2, block=10)[0]
    assert blk.offset == max(r.offset for r in singles)


def test_scan_rejects_bad_input():
    with pytest.raises(ValueError):
        scan_worst_offset([], Fraction(1, 4), 2)
    with pytest.raises(ValueError):
        scan_worst_offset([100], Fraction(1, 4), 2, "magic")


@pytest.mark.parametrize("recs,slope", [
    ([(10**2, 10), (10**4, 100)], 0.5),
    ([(10**2, 5), (10**4, 5)], 0.0),
    ([(10, 1), (1000, 10)], 0.5),
])
def test_fit_examples(recs, slope):
    fit = fit_exponent([GapRecord(x, o) for x, o in recs])
    assert fit.slope == pytest.approx(slope, abs=1e-12)
    assert fit.count == 2


def test_fit_drops_zero_offsets():
    recs = [GapRecord(10, 1), GapRecord(100, 0), GapRecord(1000, 10)]
    assert fit_exponent(recs).count == 2
    with pytest.raises(InsufficientData):
        fit_exponent([GapRecord(10, 1), GapRecord(100, 0)])


def test_fit_slope_at_quarter_theta():
    xs = log_grid(10**4, 10**7, 20)
    recs = scan_worst_offset(xs, Fraction(1, 4), 2, "brute", block=64)
    assert fit_exponent(recs).slope <= 0.30


def test_log_grid():
    g = log_grid(10**4, 10**8, 5)
    assert g == [10**4, 10**5, 10**6, 10**7, 10**8]
    assert log_grid(7, 7, 1) == [7]


# quarter point ------------------------------------------------------------------------

def test_quarter_point_rounding():
    for k in range(1, 200):
        x = quarter_point(k)
        assert abs(Fraction(x) - Fraction(4 * k + 1, 4) ** 2) <= Fraction(1, 2)


def test_quarter_example():
    r = quarter_point_check(100, Fraction(1, 10), 1)
    assert r.x == 10050 and r.min_offset == 48 and r.passed
    assert abs(float(r.bound) - 17.7465) < 1e-3
    # exhaustive window [98, 102]
    assert min(abs(10050 - a * b) for a in range(98, 103) for b in range(a, 103)) == 48


def test_quarter_k1000():
    assert quarter_point_check(1000, Fraction(1, 10), 1).passed


def test_quarter_vacuous_small_k():
    r = quarter_point_check(2, Fraction(1, 10), 1)
    assert float(r.bound) <= 0 and r.passed


def test_quarter_sample():
    ks = np.unique(np.rint(np.geomspace(100, 5000, 50)).astype(int))
    assert all(quarter_point_check(int(k), Fraction(15, 100), 1).passed for k in ks)


def test_quarter_rejects_large_theta():
    with pytest.raises(ValueError):
        quarter_point_check(100, Fraction(1, 4), 1)


# product gaps -------------------------------------------------------------------------

def _gap_oracle(x, theta, c):
    root = math.sqrt(x)
    lo = math.ceil(root - c * x**theta)
    hi = math.floor(root + c * x**theta)
    left = math.ceil(x - c * x ** (0.5 + theta))
    prods = sorted({a * b for a in range(lo, hi + 1) for b in range(lo, hi + 1)})
    inside = [p for p in prods if left <= p <= x]
    below = [p for p in prods if p < left]
    above = [p for p in prods if p > x]
    pts = ([below[-1]] if below else [left]) + inside + ([above[0]] if above else [x])
    return max(b - a for a, b in zip(pts, pts[1:]))


@pytest.mark.parametrize("x,theta,c", [(10**4, Fraction(1, 4), 1), (10**4, Fraction(3, 10), 1),
                                       (10**5, Fraction(3, 10), 1), (10**6, Fraction(3, 10), 1)])
def test_product_gap_matches_enumeration(x, theta, c):
    r = product_gap(x, theta, c)
    assert r.max_gap == _gap_oracle(x, float(theta), c)
    assert r.passed
    assert r.max_gap >= float(x) ** (0.5 - float(theta)) / (4 * c)


def test_product_gap_first_example():
    r = product_gap(10**4, Fraction(1, 4), 1)
    assert r.max_gap >= 2.5 and str(r.floor) == "2.500000"


def test_product_gap_degenerate_window():
    # theta = 0, c = 1/2: window {100}; interval [9950, 10000]; only 10000 inside
    r = product_gap(10**4, 0, Fraction(1, 2))
    assert r.products == 1
    assert r.max_gap == 10**4 - 9950


def test_product_gap_sample():
    for x in log_grid(10**4, 10**6, 10):
        assert product_gap(x, Fraction(3, 10), 1).passed


# multiplication table ------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 10, 37, 100])
def test_mult_table_matches_set_oracle(n):
    assert mult_table_count(n) == len({a * b for a in range(1, n + 1) for b in range(1, n + 1)})


def test_mult_table_examples():
    assert [mult_table_count(n) for n in (1, 2, 10)] == [1, 3, 42]


def test_mult_table_density_trend():
    ns = list(range(10, 101, 10))
    dens = [Fraction(mult_table_count(n), n * n) for n in ns]
    rises = [(ns[i], ns[i + 1]) for i in range(len(ns) - 1) if dens[i + 1] >= dens[i]]
    # 1484/4900 < 1939/6400: the only uptick on this grid
    assert rises == [(70, 80)]
    assert dens[-1] < dens[0]


def test_mult_table_limit():
    with pytest.raises(ValueError):
        mult_table_count(11, limit=10)
    with pytest.raises(ValueError):
        mult_table_count(0)


def test_erdos_alpha():
    assert round(ERDOS_ALPHA, 3) == 0.086
    assert ERDOS_ALPHA == pytest.approx(0.0860713, abs=1e-7)


# two squares -----------------------------------------------------------------------------

def test_sieve_examples():
    s = two_squares_sieve(100)
    assert s[25] and not s[7]
    brute = {u * u + v * v for u in range(11) for v in range(11)}
    assert int(s.sum()) == len([m for m in range(101) if m in brute])
    assert int(s.sum()) == sum(is_sum_of_two_squares(m) for m in range(101))


def test_sieves_agree_to_1e5():
    a = two_squares_sieve(10**5)
    b = two_squares_by_factorization(10**5)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_segmented_sieve_identical(workers):
    assert np.array_equal(two_squares_sieve(54321, workers=workers), two_squares_sieve(54321))


def test_sieve_limit():
    with pytest.raises(ValueError):
        two_squares_sieve(11, max_limit=10)


def test_two_squares_near_examples():
    r = two_squares_near(103, 5)
    assert (r.d, r.D, r.n, r.offset) == (2, 10, 104, 1)
    r = two_squares_near(144, 3)
    assert (r.d, r.offset) == (0, 0)
    r = two_squares_near(2, 1)
    assert (r.d, r.D, r.n, r.offset) == (1, 1, 2, 0)


def test_two_squares_near_enumeration():
    for x in range(2, 2000):
        dm = math.isqrt(x - 1)
        dm = min(dm, 6)
        r = two_squares_near(x, dm)
        cands = []
        for d in range(dm + 1):
            D = math.isqrt(x - d * d)
            D = min((D, D + 1), key=lambda k: abs(k * k - (x - d * d)))
            cands.append((abs(x - D * D - d * d), d))
        assert (r.offset, r.d) == min(cands)


def test_two_squares_near_bound():
    for x in log_grid(10**4, 10**7, 100):
        dm = math.floor(2 * x**0.25)
        assert two_squares_near(x, dm).offset <= 4 * x**0.25


def test_max_gap_examples():
    # sums of two squares in [1, 10]: 1 2 4 5 8 9 10, widest step 5 -> 8
    assert max_gap_two_squares(1, 10) == (3, 5)
    assert max_gap_two_squares(25, 26) == (1, 25)


def test_max_gap_against_oracle():
    lo, hi = 1, 10**5
    marked = [m for m in range(lo, hi + 1) if is_sum_of_two_squares(m)]
    diffs = [(b - a, -a) for a, b in zip(marked, marked[1:])]
    g, neg_at = max(diffs)
    assert max_gap_two_squares(lo, hi) == (g, -neg_at)
