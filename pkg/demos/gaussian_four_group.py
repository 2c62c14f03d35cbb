"""Index tuples of <2+i>, <3+2i>, <(2+i)(3+2i)>, <(2+i)^2(3+2i)> in Z[i]."""
from __future__ import annotations

from indexmap.gaussidx import FOUR_GROUP, psi_q_scan, reduce_and_index, site
from indexmap.psidecide import four_group_pattern, gaussian_four_group, psi_ell_membership_maximal

# %% one split site and one inert site
for p in (17, 7):
    s = site(p)
    print(s, reduce_and_index(FOUR_GROUP, s).indices)

# %% 5-adic valuations over all sites of norm up to 10^6
hist = psi_q_scan(5, 10 ** 6)
for t, n in sorted(hist.items(), key=lambda kv: -kv[1])[:8]:
    print(t, n, "ok" if four_group_pattern(t) else "VIOLATION")

# %% the congruence decider predicts the same shape without scanning
fam = gaussian_four_group()
for t in [(1, 1, 1, 1), (2, 1, 1, 1), (2, 2, 1, 1), (0, 3, 0, 0)]:
    print(t, psi_ell_membership_maximal(fam, t, 5).member)
