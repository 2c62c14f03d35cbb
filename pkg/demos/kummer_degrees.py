"""Degrees of Q(zeta_m, a^(1/n)) over Q(zeta_m), exact and counted."""
from __future__ import annotations

from indexmap.kummerdeg import degree, degree_statistical, field_degree

# %% sqrt(2) already lives in Q(zeta_8), so 2^(1/8) only adds degree 4
print(degree(2, 8, 8), degree(2, 8, 16), degree(5, 2, 10), degree(5, 2, 6))

# %% split primes give the same answer
for a, n, m in [(2, 8, 8), (-3, 4, 24), (4, 4, 40)]:
    est = degree_statistical(a, n, m, 10 ** 6)
    print((a, n, m), field_degree(a, n, m), f"[{est.low:.1f}, {est.high:.1f}]", field_degree(a, n, m) in est)
