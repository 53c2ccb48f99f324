"""
Offsets, adversaries and gaps
=============================

How close can products of window integers get to x?  A log-spaced scan
estimates the exponent, the quarter point shows small windows can fail,
and a counting argument forces gaps among products.
"""

from fractions import Fraction

from almost_squares.gaps import (
    fit_exponent,
    log_grid,
    product_gap,
    quarter_point_check,
    scan_worst_offset,
)

xs = log_grid(10**4, 10**7, 12)
recs = scan_worst_offset(xs, Fraction(1, 4), 2, "brute", block=64)
for r in recs:
    print(f"{r.x:>10d}  worst offset {r.offset}")
fit = fit_exponent(recs)
print(f"offset ~ x^{fit.slope:.3f} over {fit.count} points")

# sqrt(x) a quarter from an integer: every product in a small window misses
for k in (100, 1000, 5000):
    q = quarter_point_check(k, Fraction(15, 100), 1)
    print(f"x={q.x}: min offset {q.min_offset} >= {q.bound}  {q.passed}")

# few products, long interval: some gap must be large
for x in (10**4, 10**5, 10**6):
    g = product_gap(x, Fraction(3, 10), 1)
    print(f"x={x}: widest gap {g.max_gap} among {g.products} products, floor {g.floor}")
