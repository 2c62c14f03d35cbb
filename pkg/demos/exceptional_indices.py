"""Indices that never occur: the residue classes ruled out for a few integers."""
from __future__ import annotations

import numpy as np

from indexmap.rank1image import exceptional_sets, image_descriptor, in_image
from indexmap.ratmul import canonical_decompose
from indexmap.resindex import scan_arrays

# %% -100 = -(10)^2 can never have index 10 mod 20
c = canonical_decompose(-100)
print(c.to_json())
d = image_descriptor(-100)
print("modulus", d.modulus, "forbidden", sorted(set(range(d.modulus)) - set(d.allowed_residues)))

seen = np.unique(scan_arrays([-100], 10 ** 6).domain()[1][:, 0])
print("observed indices = 10 mod 20:", [int(h) for h in seen if h % 20 == 10])

# %% cubes and squares leave their own marks
for a in (4, -27, 64, 12):
    sets = exceptional_sets(a)
    print(a, [s.kind for s in sets.present], [h for h in range(1, 25) if not in_image(a, h)])
