"""
Exact square roots and decisions
================================

Every yes/no question about sqrt(m) is settled with integers; decimals
only appear when a value is printed.
"""

from fractions import Fraction

from almost_squares.exact import (
    fixed_power,
    jacobi,
    mod_inverse,
    nearest_sqrt_int,
    power_bounds,
    sqrt_dist_lt,
    sqrt_fixed,
)

# nearest integer to sqrt(m): compare 4m with (2s + 1)^2, no rounding anywhere
for m in (24, 26, 31, 10**40 + 1):
    print(m, "->", nearest_sqrt_int(m))

# is sqrt(26) within 1/10 of an integer?  (5.099...)
print("||sqrt 26|| < 1/10:", sqrt_dist_lt(26, 1, 10))

# printed values carry their precision with them
print("sqrt 2 =", sqrt_fixed(2, 30))
print("10^6 ^ (1/4) =", fixed_power(10**6, Fraction(1, 4), 12))

# irrational powers come back as a certified bracket
lo, hi = power_bounds(997, Fraction(3, 10))
print("997^0.3 in", float(lo), float(hi), "width", float(hi - lo))

# number theory helpers used by the exponential sums
print("(2/15) =", jacobi(2, 15), " 3^-1 mod 7 =", mod_inverse(3, 7))
