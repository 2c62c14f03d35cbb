"""How often is 2 a primitive root, and which indices does it take?"""
from __future__ import annotations

# %% a few hand-checkable primes
from indexmap.resindex import index_tuple, multiplicative_order

for p in (3, 7, 73, 113):
    print(p, "order", multiplicative_order(2, p), "index", index_tuple([2], p).indices[0])

# %% scan every prime up to a million
import numpy as np

from indexmap.resindex import scan_arrays

res = scan_arrays([2], 10 ** 6)
primes, idx = res.domain()
values, counts = np.unique(idx[:, 0], return_counts=True)
print("primes scanned:", len(primes))
for h, c in list(zip(values, counts))[:12]:
    print(f"  index {h:3d}: {c:6d}  ({c / len(primes):.4f})")

# %% compare with the truncated Euler product
from indexmap.density import truncated_density_rank1

for t in (10, 50, 1000):
    print("t =", t, float(truncated_density_rank1(2, 1, t)))
print("observed share with index 1:", counts[0] / len(primes))
# the product keeps shrinking with t; at t = 50 it is still 0.0015 above its limit
