"""Linear congruences with incongruence side conditions modulo powers of q.

A row ``(v, c, e, strict)`` asks for ``<y, v> = c (mod q^e)``; a strict row
also asks ``<y, v> != c (mod q^(e+1))``.  Two deciders are provided:

* ``solvable_bruteforce`` enumerates ``y`` over a box of side ``q^(max e + 1)``.
* ``solvable_structured`` picks a basis of rows, rewrites every row in it and
  counts how many residues the strict rows can exclude.  It declines inputs
  outside its regime by raising ``NotApplicable``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
from sympy.ntheory.modular import crt

from . import _lattice

DEFAULT_BUDGET = 10 ** 8
EXPONENT_CAP = 12


class NotApplicable(Exception):
    """The structured criterion does not cover this system."""


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Row:
    v: tuple
    c: int
    e: int
    strict: bool = False

    def to_json(self) -> dict:
        return {"v": list(self.v), "c": self.c, "e": self.e, "strict": self.strict}


@dataclass(frozen=True)
class CongruenceSystem:
    q: int
    dim: int
    rows: tuple = ()
    residue_constraint: tuple | None = None  # (M, frozenset of dim-tuples mod M)
    exponent_cap: int = EXPONENT_CAP

    def __post_init__(self):
        rows = tuple(r if isinstance(r, Row) else Row(*r) for r in self.rows)
        rows = tuple(Row(tuple(int(x) for x in r.v), int(r.c), int(r.e), bool(r.strict)) for r in rows)
        object.__setattr__(self, "rows", rows)
        if self.q < 2:
            raise ValueError("q must be a prime")
        for r in rows:
            if len(r.v) != self.dim:
                raise ValueError(f"row {r} has wrong length for dim {self.dim}")
            if not 0 <= r.e <= self.exponent_cap:
                raise ValueError(f"exponent {r.e} outside [0, {self.exponent_cap}]")
        if self.residue_constraint is not None:
            M, allowed = self.residue_constraint
            allowed = frozenset(tuple(int(x) % M for x in (a if isinstance(a, (list, tuple)) else (a,)))
                                for a in allowed)
            if any(len(a) != self.dim for a in allowed):
                raise ValueError("residue constraint entries must have length dim")
            object.__setattr__(self, "residue_constraint", (int(M), allowed))

    @property
    def max_e(self) -> int:
        return max((r.e for r in self.rows), default=0)

    @property
    def strict_count(self) -> int:
        return sum(r.strict for r in self.rows)

    def with_rows(self, *extra) -> CongruenceSystem:
        return CongruenceSystem(self.q, self.dim, self.rows + tuple(extra),
                                self.residue_constraint, self.exponent_cap)

    def check(self, y) -> bool:
        """Whether the integer vector ``y`` satisfies every row and the residue constraint."""
        q = self.q
        for r in self.rows:
            s = sum(a * b for a, b in zip(y, r.v)) - r.c
            if s % q ** r.e:
                return False
            if r.strict and s % q ** (r.e + 1) == 0:
                return False
        if self.residue_constraint is not None:
            M, allowed = self.residue_constraint
            if tuple(x % M for x in y) not in allowed:
                return False
        return True

    def to_json(self) -> dict:
        out = {"q": self.q, "dim": self.dim, "rows": [r.to_json() for r in self.rows]}
        if self.residue_constraint is not None:
            M, allowed = self.residue_constraint
            out["residue_constraint"] = {"M": M, "allowed": sorted(list(a) for a in allowed)}
        return out

    @classmethod
    def from_json(cls, obj) -> CongruenceSystem:
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows = [Row(tuple(r["v"]), r["c"], r["e"], r.get("strict", False)) for r in obj.get("rows", [])]
        rc = obj.get("residue_constraint")
        if rc is not None:
            rc = (rc["M"], rc["allowed"])
        return cls(int(obj["q"]), int(obj["dim"]), tuple(rows), rc)


def load(path) -> CongruenceSystem:
    with open(path) as fh:
        return CongruenceSystem.from_json(json.load(fh))


def dump(sys: CongruenceSystem, path):
    with open(path, "w") as fh:
        json.dump(sys.to_json(), fh, indent=1)


def _vq(n: int, q: int) -> int:
    v = 0
    while n and n % q == 0:
        n //= q
        v += 1
    return v


@dataclass
class Verdict:
    solvable: bool
    witness: tuple | None = None
    method: str = "bruteforce"
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.solvable


def solvable_bruteforce(sys: CongruenceSystem, budget: int = DEFAULT_BUDGET,
                        chunk: int = 1 << 18) -> Verdict:
    """Enumerate ``y`` in ``[0, q^K)^dim`` with ``K = max e + 1``.

    A residue constraint modulo ``M`` only matters through ``y mod q^v_q(M)``
    (the coprime part is free by CRT), so the box side grows to cover it.
    """
    q, dim = sys.q, sys.dim
    K = sys.max_e + 1
    proj = None
    if sys.residue_constraint is not None:
        M, allowed = sys.residue_constraint
        if not allowed:
            return Verdict(False)
        qv = q ** _vq(M, q)
        K = max(K, _vq(M, q))
        proj = {tuple(x % qv for x in a) for a in allowed}
    B = q ** K
    total = B ** dim
    if total > budget:
        raise BudgetExceeded(f"{total} candidates exceed budget {budget}")
    if dim == 0:
        return Verdict(sys.check(()), () if sys.check(()) else None)
    if proj is not None:
        codes = np.asarray(sorted(sum(a[k] * qv ** (dim - 1 - k) for k in range(dim)) for a in proj),
                           dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        ys = [(idx // B ** (dim - 1 - k)) % B for k in range(dim)]
        ok = np.ones(len(idx), dtype=bool)
        for r in sys.rows:
            mod = q ** (r.e + 1)
            s = np.zeros(len(idx), dtype=np.int64)
            for k in range(dim):
                if r.v[k]:
                    s = (s + ys[k] * (r.v[k] % mod)) % mod
            s = (s - r.c) % mod
            ok &= s % q ** r.e == 0
            if r.strict:
                ok &= s != 0
        if proj is not None:
            code = np.zeros(len(idx), dtype=np.int64)
            for k in range(dim):
                code = code * qv + ys[k] % qv
            ok &= np.isin(code, codes)
        hit = np.flatnonzero(ok)
        if len(hit):
            j = int(hit[0])
            y = tuple(int(c[j]) for c in ys)
            if proj is not None:
                y = _lift(y, B, qv, sys.residue_constraint)
            return Verdict(True, y)
    return Verdict(False)


def _lift(y, B, qv, constraint):
    """Move ``y`` within its class mod ``B`` so it meets the residue constraint mod ``M``."""
    M, allowed = constraint
    rest = M // qv
    a = min(a for a in allowed if all((x - t) % qv == 0 for x, t in zip(y, a)))
    return tuple(int(crt([B, rest], [x, t])[0]) for x, t in zip(y, a))


def _basis(sys: CongruenceSystem):
    """Maximal independent row set with the largest total exponent.

    Ties go to the lexicographically smallest index set.  Greedy selection
    by descending exponent gives the optimal weight; when the number of
    candidate subsets is small they are searched in lexicographic order.
    """
    rows = sys.rows
    order = sorted(range(len(rows)), key=lambda i: (-rows[i].e, i))
    chosen = []
    for i in order:
        if any(rows[i].v) and _lattice.rank([rows[j].v for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    best = sum(rows[i].e for i in chosen)
    r = len(chosen)
    nz = [i for i in range(len(rows)) if any(rows[i].v)]
    if r and comb(len(nz), r) <= 5000:
        for S in combinations(nz, r):
            if sum(rows[i].e for i in S) == best and _lattice.rank([rows[i].v for i in S]) == r:
                return list(S)
    return sorted(chosen)


def _unit_mod(x: Fraction, q: int, k: int) -> int:
    m = q ** k
    return x.numerator * pow(x.denominator, -1, m) % m


def solvable_structured(sys: CongruenceSystem) -> Verdict:
    """Decide solvability for large ``q`` without enumeration.

    Raises ``NotApplicable`` unless ``q`` exceeds the number of strict rows,
    the chosen basis stays independent modulo ``q``, every coefficient
    expressing a row in the basis is a ``q``-adic unit, and any residue
    constraint has modulus prime to ``q``.
    """
    q, rows = sys.q, sys.rows
    if q <= sys.strict_count:
        raise NotApplicable(f"q = {q} does not exceed the {sys.strict_count} strict rows")
    if sys.residue_constraint is not None:
        M, allowed = sys.residue_constraint
        if M % q == 0:
            raise NotApplicable("residue constraint modulus divisible by q")
        if not allowed:
            return Verdict(False, method="structured", notes=["empty residue constraint"])
    J = _basis(sys)
    V = [rows[j].v for j in J]
    if J and _lattice.rank_mod(V, q) != len(J):
        raise NotApplicable("basis rows are dependent modulo q")
    coeffs = []
    for i, r in enumerate(rows):
        u = _lattice.solve_rational(V, r.v)
        if u is None:
            raise AssertionError("row outside the span of a maximal independent set")
        for x in u:
            if x and (x.numerator % q == 0 or x.denominator % q == 0):
                raise NotApplicable(f"coefficient {x} of row {i} is not a q-unit")
        coeffs.append(u)
    notes = []
    free = 0  # strict rows that cut out one hyperplane of residues each
    for i, (r, u) in enumerate(zip(rows, coeffs)):
        k = r.e + 1
        delta = (sum(_unit_mod(x, q, k) * rows[j].c for x, j in zip(u, J) if x) - r.c) % q ** k
        support = [rows[j].e for x, j in zip(u, J) if x]
        if min(support, default=k) < r.e:
            raise AssertionError("basis does not maximise the exponent sum")
        if delta % q ** r.e:
            notes.append(f"row {i}: congruence contradicts the basis rows")
            return Verdict(False, method="structured", notes=notes)
        if not r.strict:
            continue
        if min(support, default=k) >= k:
            if delta == 0:
                notes.append(f"row {i}: incongruence fails on every solution")
                return Verdict(False, method="structured", notes=notes)
        else:
            free += 1
    # each remaining strict row excludes q^(|J|-1) of q^|J| residue vectors
    if free:
        notes.append(f"{free} strict rows exclude at most {free}/{q} of the residues")
    return Verdict(True, method="structured", notes=notes)


def solve(sys: CongruenceSystem, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Structured decision when available, otherwise enumeration."""
    try:
        return solvable_structured(sys)
    except NotApplicable as exc:
        v = solvable_bruteforce(sys, budget)
        v.notes.append(f"structured path declined: {exc}")
        return v


QS = (2, 3, 5, 7, 11, 101)


def random_system(rng: random.Random, budget: int) -> CongruenceSystem:
    q = rng.choice(QS)
    dim = rng.randint(1, 3)
    emax = 3
    while emax > 0 and q ** ((emax + 1) * dim) > budget:
        emax -= 1
    y0 = [rng.randrange(q ** (emax + 1)) for _ in range(dim)]
    consistent = rng.random() < 0.6
    rows = []
    for _ in range(rng.randint(0, 4)):
        v = tuple(rng.randint(-2, 2) for _ in range(dim))
        e = rng.randint(0, emax)
        if consistent:
            c = sum(a * b for a, b in zip(y0, v)) + q ** e * rng.randrange(q)
        else:
            c = rng.randrange(q ** (e + 1))
        rows.append(Row(v, c, e, rng.random() < 0.4))
    return CongruenceSystem(q, dim, tuple(rows))


@dataclass
class DifferentialReport:
    checked: int = 0
    not_applicable: int = 0
    skipped_budget: int = 0
    solvable: int = 0
    discrepancies: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"checked": self.checked, "not_applicable": self.not_applicable,
                "skipped_budget": self.skipped_budget, "solvable": self.solvable,
                "discrepancies": [s.to_json() for s in self.discrepancies]}


def differential_check(seed: int, count: int, budget: int = 5 * 10 ** 5) -> DifferentialReport:
    """Run both deciders on ``count`` seeded random systems and compare."""
    rng = random.Random(seed)
    rep = DifferentialReport()
    for _ in range(count):
        sys = random_system(rng, budget)
        try:
            fast = solvable_structured(sys)
        except NotApplicable:
            rep.not_applicable += 1
            continue
        try:
            slow = solvable_bruteforce(sys, budget)
        except BudgetExceeded:
            rep.skipped_budget += 1
            continue
        rep.checked += 1
        rep.solvable += slow.solvable
        if slow.solvable != fast.solvable:
            rep.discrepancies.append(sys)
    return rep
