"""
Finding almost squares near x
=============================

Three routes to n = ab close to x with a, b near sqrt(x): an exhaustive
pair scan, the difference-of-squares d-search, and the conditional
fractional-window schedule.
"""

from fractions import Fraction

from almost_squares.core import (
    brute_force_nearest,
    conditional_find,
    conditional_schedule,
    d_search,
    search_window,
    taylor_error,
)

x = 997
w = search_window(x, Fraction(1, 4), 2)
print("window", w.lo, "..", w.hi)

r = brute_force_nearest(x, w)
print("pair scan:", r.a, "*", r.b, "=", r.n, "offset", r.offset)

# n = D^2 - d^2 with D the nearest integer to sqrt(x + d^2)
r = d_search(x, 0, 5)
print("d-search:  D =", r.D, "d =", r.d, "n =", r.n, "offset", r.offset)

# the conditional route looks for d with {d^2 / (2 sqrt x)} near 1 - {sqrt x}
N, delta = conditional_schedule(x, Fraction(3, 10), Fraction(1, 100))
print("schedule: N =", N, "Delta ~", float(delta))
r = conditional_find(x, Fraction(3, 10), Fraction(1, 100))
print("conditional: d =", r.d, "n =", r.n, "offset", r.offset)

# why it works: sqrt(x + d^2) - sqrt(x) is d^2 / (2 sqrt x) to within d^4 / x^(3/2)
print("Taylor error at x=1e8, d=100:", taylor_error(10**8, 100, 10))
