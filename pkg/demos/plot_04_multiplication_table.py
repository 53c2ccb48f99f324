"""
Multiplication table and sums of two squares
============================================

Distinct entries of the n x n table thin out slowly; sums of two squares
near x are found by the same nearest-root trick as almost squares.
"""

import math

import numpy as np

from almost_squares.gaps import (
    ERDOS_ALPHA,
    max_gap_two_squares,
    mult_table_count,
    two_squares_by_factorization,
    two_squares_near,
    two_squares_sieve,
)

for n in (10, 100, 1000, 3000):
    c = mult_table_count(n)
    print(f"n={n:5d}  distinct {c:8d}  density {c / n**2:.4f}")
print(f"decay exponent alpha = {ERDOS_ALPHA:.5f}")

# the density is not monotone step by step
print("n=70:", mult_table_count(70) / 70**2, " n=80:", mult_table_count(80) / 80**2)

# two sieves, two methods, same answer
a = two_squares_sieve(10**5)
b = two_squares_by_factorization(10**5)
print("sieves agree:", np.array_equal(a, b), " count:", int(a.sum()))

for x in (103, 10**6 + 7, 9_876_543):
    r = two_squares_near(x, math.floor(2 * x**0.25))
    print(f"x={x}: {r.D}^2 + {r.d}^2 = {r.n}, offset {r.offset}")

print("widest gap in [1, 10^5]:", max_gap_two_squares(1, 10**5))
