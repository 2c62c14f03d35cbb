"""Linear congruences with 'but not modulo the next power' side conditions."""
from __future__ import annotations

from indexmap.consolve import CongruenceSystem, Row, differential_check, solvable_bruteforce, solve

# %% x = 0 mod 9 but x != 0 mod 27: the smallest witness is 9
sys1 = CongruenceSystem(3, 1, (Row((1,), 0, 2, True),))
print(solvable_bruteforce(sys1))

# %% a deeper congruence on the same form overrides a strict shallow one
sys2 = CongruenceSystem(101, 2, (Row((1, 0), 0, 2), Row((1, 0), 0, 1, True)))
print(solve(sys2))

# %% both deciders on a thousand random systems
rep = differential_check(1, 1000)
print(rep.to_json())
