"""
Gauss sums and twisted Salie sums
=================================

Complete quadratic sums have closed forms; the incomplete twisted sums
are only conjecturally bounded, so we measure them.
"""

import math

from almost_squares.exact import jacobi
from almost_squares.expsums import (
    ExpSumQuery,
    default_probe_grid,
    gauss_sum,
    probe_conjecture,
    salie_sum,
)

for a, q in [(1, 3), (2, 5), (3, 7), (5, 13)]:
    g = gauss_sum(a, 0, q)
    eps = 1 if q % 4 == 1 else 1j
    print(f"G({a},0;{q}) = {g:.12f}   closed form {eps * math.sqrt(q) * jacobi(a, q):.12f}")

print("Salie(1,3,H=2,K=2):", salie_sum(ExpSumQuery(1, 3, 2, 2)))

rep = probe_conjecture(default_probe_grid(61), eps=0.1)
print(f"{len(rep.rows)} queries, max |S| / bound = {rep.max_ratio:.4f}")
print("attained at", rep.argmax)
