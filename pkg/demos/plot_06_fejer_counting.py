"""
Fejer windows and counting fractional parts
===========================================

A triangular window under the indicator of (lam - Delta, lam + Delta)
gives a lower bound for how many n^2 p / q land there, and its Fourier
series has explicit, nonnegative coefficients.
"""

from fractions import Fraction

import numpy as np

from almost_squares.expsums import (
    FejerWindow,
    counting_inequality_check,
    fractional_count,
    main_term_compare,
    tail_bound,
)

w = FejerWindow(0.1, 0.3)
xs = np.linspace(0, 1, 1000, endpoint=False)
exact = np.array([w.g_lambda(float(x)) for x in xs])
for M in (10, 100, 1000):
    err = np.max(np.abs(w.partial_sum(xs, M) - exact))
    print(f"M={M:5d}  sup error {err:.2e}  tail bound {tail_bound(0.1, M):.2e}")

print(fractional_count(1, 5, 0, Fraction(1, 10), 10))
print(counting_inequality_check(1, 5, 0, Fraction(1, 10), 10))

rep = main_term_compare(10**6, Fraction(28, 100), Fraction(1, 100), [0, 0.25, 0.5, 0.75])
print(f"q={rep.q} N={rep.N}")
for row in rep.rows:
    print(row)
