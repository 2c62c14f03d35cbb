"""Valuation images and separation data.

Two independent pieces live here.

* ``psi_ell_membership_maximal`` decides whether a tuple of ell-adic index
  valuations occurs, for families whose ell-power Kummer degrees are as
  large as possible.  A Frobenius element is modelled by ``(x0, x1..xr)``:
  ``x0`` is the cyclotomic character and ``x1..xr`` the Kummer cocycle on an
  independent basis.  The tuple turns into congruence systems for
  ``consolve``.
* Rank-one separation data over Q (``SeparationData``), the gcd reduction
  of index queries and an estimator that checks both against a prime scan.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np
from sympy import factorint, isprime, primefactors, totient

from . import _lattice
from .consolve import CongruenceSystem, Row, solve
from .kummerdeg import degree
from .rank1image import in_image
from .ratmul import SubgroupLattice, canonical_decompose, join
from .resindex import scan_arrays, valuation


class NotCertified(Exception):
    """The family is not known to have maximal ell-power Kummer degrees."""


@dataclass(frozen=True)
class MaximalFamily:
    """Groups given by generator exponent vectors over a free basis.

    ``groups[i]`` is a tuple of integer vectors of length ``rank``.  The
    family counts as certified at every odd ell, except where ``lattice``
    (the exponent rows of the basis, when known) fails to be saturated.
    ``provenance`` records why the certificate holds.
    """

    groups: tuple
    rank: int
    provenance: str = ""
    labels: tuple = ()
    lattice: tuple | None = None

    def rank_function(self, subset) -> int:
        rows = [v for i in subset for v in self.groups[i]]
        return _lattice.rank(rows) if rows else 0

    def rank_mod(self, subset, q: int) -> int:
        rows = [v for i in subset for v in self.groups[i]]
        return _lattice.rank_mod(rows, q) if rows else 0

    def is_certified(self, ell: int) -> bool:
        if ell % 2 == 0:
            return False
        return self.lattice is None or _lattice.rank_mod(self.lattice, ell) == self.rank


def gaussian_four_group() -> MaximalFamily:
    """``<a>, <b>, <ab>, <a^2 b>`` for the Gaussian primes a = 2+i, b = 3+2i.

    For odd ell the degrees of Q(i)(zeta_m, a^(1/m), b^(1/m)) over
    Q(i)(zeta_m) are m^2; this is taken as known input.
    """
    vecs = (((1, 0),), ((0, 1),), ((1, 1),), ((2, 1),))
    return MaximalFamily(vecs, 2, "Gaussian pair 2+i, 3+2i: maximal for odd ell",
                         ("2+i", "3+2i", "(2+i)(3+2i)", "(2+i)^2(3+2i)"))


def rational_family(groups) -> MaximalFamily:
    """Family of rational groups written over a basis of their join.

    For odd ell, abelian radicals over Q come only from ell-th powers in Q,
    so the degrees are maximal exactly when the join is ell-saturated in the
    exponent lattice.
    """
    groups = [g if isinstance(g, SubgroupLattice)
              else SubgroupLattice.of(*g) if isinstance(g, (list, tuple))
              else SubgroupLattice.of(g) for g in groups]
    W = join(*groups)
    H, _, pivots = _lattice.hermite_form(W.matrix)
    basis = tuple(tuple(H[k]) for k in range(len(pivots)))
    out = []
    for g in groups:
        vecs = []
        for row in g.reindexed(W.columns):
            c = _lattice.echelon_coordinates(H, pivots, list(row))
            vecs.append(tuple(int(x) for x in c))
        out.append(tuple(vecs))
    labels = tuple(",".join(str(x) for x in g.generators) for g in groups)
    return MaximalFamily(tuple(out), len(basis), "odd ell, exponent lattice saturated at ell",
                         labels, basis)


def gaussian_family(groups) -> MaximalFamily:
    """Family of subgroups of Q(i)^x, each given by Gaussian integer generators.

    For odd ell the unit i is an ell-th power and an element of Q(i) that is
    an ell-th power in an abelian extension is one already, so the same
    saturation test certifies maximality.
    """
    from .gaussidx import gaussian_lattice

    lats = [gaussian_lattice(*(g if isinstance(g, (list, tuple)) else [g])) for g in groups]
    return replace(rational_family(lats), provenance="Gaussian groups, odd ell, exponent lattice saturated at ell")


def independent_primes(*primes) -> MaximalFamily:
    """``<p_1>, ..., <p_n>`` for distinct primes ``p_i >= 3``."""
    if len(set(primes)) != len(primes) or any(p < 3 or not isprime(p) for p in primes):
        raise ValueError("need distinct primes >= 3")
    n = len(primes)
    vecs = tuple(((tuple(int(i == j) for j in range(n)),)) for i in range(n))
    return MaximalFamily(vecs, n, "independent rational primes, odd ell",
                         tuple(str(p) for p in primes))


@dataclass
class EllVerdict:
    member: bool
    ell: int
    target: tuple
    systems: list = field(default_factory=list)  # (system, solvable) pairs tried
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"ell": self.ell, "tuple": list(self.target), "member": self.member,
                "witness": None if self.witness is None else list(self.witness),
                "systems": [{"system": s.to_json(), "solvable": ok} for s, ok in self.systems]}


def ell_systems(family: MaximalFamily, target, ell: int):
    """The congruence systems whose solvability decides ``target``.

    Coordinates are ``y = (x0, x1, ..., xr)``.  Each group imposes its
    congruences; for each group one of two ways to stop the valuation from
    growing is chosen, giving one system per choice.
    """
    e = max(target, default=0)
    dim = family.rank + 1
    e0 = tuple(int(k == 0) for k in range(dim))
    base = [Row(e0, 1, e)]
    if e == 0:
        base.append(Row(e0, 0, 0, True))  # x0 must be a unit
    options = []
    for vecs, ei in zip(family.groups, target):
        lifted = [(0,) + tuple(v) for v in vecs]
        base.extend(Row(w, 0, ei) for w in lifted)
        options.append([Row(e0, 1, ei, True)] + [Row(w, 0, ei, True) for w in lifted])
    for choice in product(*options):
        yield CongruenceSystem(ell, dim, tuple(base) + tuple(choice))


def psi_ell_membership_maximal(family: MaximalFamily, target, ell: int,
                               keep_systems: bool = False) -> EllVerdict:
    """Whether ``target`` lies in the image of the ell-adic valuation map."""
    target = tuple(int(x) for x in target)
    if len(target) != len(family.groups) or min(target, default=0) < 0:
        raise ValueError("tuple must have one nonnegative entry per group")
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if not family.is_certified(ell):
        raise NotCertified(f"family not certified maximal at ell = {ell}")
    verdict = EllVerdict(False, ell, target)
    for sys in ell_systems(family, target, ell):
        v = solve(sys)
        if keep_systems:
            verdict.systems.append((sys, v.solvable))
        if v.solvable:
            verdict.member = True
            verdict.witness = v.witness
            break
    return verdict


def ell_image_enumerated(family: MaximalFamily, ell: int, cap: int) -> set:
    """All valuation tuples with entries ``<= cap`` by enumerating ``x mod ell^(cap+1)``.

    Independent of the congruence machinery; usable for small ``ell^(cap+1)``.
    """
    K = cap + 1
    B = ell ** K
    dim = family.rank + 1
    grids = np.meshgrid(*[np.arange(B, dtype=np.int64)] * dim, indexing="ij")
    xs = [g.ravel() for g in grids]
    keep = xs[0] % ell != 0
    xs = [x[keep] for x in xs]
    cyc = valuation_array((xs[0] - 1) % B, ell, K)
    cols = []
    for vecs in family.groups:
        v = np.full(len(cyc), K)
        for f in vecs:
            s = np.zeros(len(cyc), dtype=np.int64)
            for k, c in enumerate(f):
                s = (s + c * xs[k + 1]) % B
            v = np.minimum(v, valuation_array(s, ell, K))
        cols.append(np.minimum(v, cyc))
    tup = np.stack(cols, axis=1)
    tup = tup[(tup < K).all(axis=1)]
    return {tuple(int(t) for t in row) for row in np.unique(tup, axis=0)}


def valuation_array(x, ell: int, cap: int) -> np.ndarray:
    """ell-adic valuation of residues modulo ``ell^cap`` (0 maps to ``cap``)."""
    v = np.zeros(len(x), dtype=np.int64)
    cur = np.asarray(x, dtype=np.int64).copy()
    for _ in range(cap):
        m = (cur % ell == 0) & (v < cap)
        m &= cur != 0
        v[m] += 1
        cur[m] //= ell
    v[np.asarray(x) == 0] = cap
    return v


def four_group_pattern(t) -> bool:
    """All entries equal, or one strictly larger and the other three equal."""
    s = sorted(t)
    return s[0] == s[-2] and s[-2] <= s[-1]


# ---------------------------------------------------------------- rank one


@dataclass(frozen=True)
class SeparationData:
    a: Fraction
    h_min: int
    e_ell: dict
    z_bound: int

    def to_json(self) -> dict:
        return {"a": str(self.a), "h_min": self.h_min,
                "e_ell": {str(k): v for k, v in sorted(self.e_ell.items())},
                "z_bound": self.z_bound}


def separation_data(a) -> SeparationData:
    """Least separation value and its ell-adic counterparts for ``<a>``.

    Writing ``a = +-x^(2^d)`` with ``x`` not a square, ``a^(1/2^z)`` lies
    in an abelian extension of Q exactly for ``z <= d + 1``; odd roots are
    abelian only through ``D``.  With only the 2-power roots of unity
    available, the step ``z = d + 1`` survives iff ``Q(sqrt(x))`` has
    2-power conductor, i.e. ``T = 1``.
    """
    c = canonical_decompose(a)
    e = {2: c.d + int(c.T == 1)}
    for ell, v in factorint(c.D).items():
        e[ell] = v
    return SeparationData(c.a, 2 ** (c.d + 1) * c.D, e, c.Z)


def gcd_reduce(a, h: int) -> int:
    """Representative of ``h`` in the divisor lattice of the separation bound.

    Membership of ``h`` in the image equals membership of the result.
    """
    if h < 1:
        raise ValueError("h must be positive")
    return gcd(h, canonical_decompose(a).Z)


def check_pairs(y: int, x: int) -> list:
    """Primes ``q`` with ``q*y | x``: the only extra conditions needed when ``y | x``."""
    if x % y:
        raise ValueError("y must divide x")
    return sorted(primefactors(x // y))


def kummer_membership(a, h: int) -> bool:
    """Membership of ``h`` decided by counting Galois elements.

    With ``y = gcd(h, Z)`` and ``x = Z``, the automorphisms of ``K_x`` that
    fix ``K_y`` but no ``K_(qy)`` for the planned primes ``q`` form a set of
    relative size ``sum_{k | rad(x/y)} mu(k) / [K_(yk) : Q]``.
    """
    Z = canonical_decompose(a).Z
    y = gcd(h, Z)
    qs = check_pairs(y, Z)
    total = Fraction(0)
    for mask in range(1 << len(qs)):
        k = 1
        for j, q in enumerate(qs):
            if mask >> j & 1:
                k *= q
        n = y * k
        total += Fraction((-1) ** bin(mask).count("1"), int(totient(n)) * degree(a, n, n))
    return total > 0


@dataclass
class SeparationReport:
    data: SeparationData
    bound: int
    observed: list              # observed indices dividing Z
    sep_discrepancies: list     # divisors y of Z with [y observed] != [gcd(y, h_min) observed]
    z_discrepancies: list       # h <= h_cap with [h observed] != [gcd(h, Z) observed]
    closed_form_mismatch: list  # h <= h_cap with in_image disagreeing with the scan

    def to_json(self) -> dict:
        return {"separation": self.data.to_json(), "bound": self.bound, "observed_divisors_of_Z": self.observed,
                "sep_discrepancies": self.sep_discrepancies, "z_discrepancies": self.z_discrepancies,
                "closed_form_mismatch": self.closed_form_mismatch}


def estimate_separation(a, bound: int, h_cap: int = 200, workers: int | None = None) -> SeparationReport:
    """Separation data plus a scan of ``Ind_p(a)`` for ``p <= bound``.

    Discrepancies are reported, not raised: periodicity with period
    ``h_min`` over divisors of ``Z`` is what the ``zeta_infinity`` notion of
    separation predicts, and it can fail where ``Z`` itself does not.
    """
    data = separation_data(a)
    res = scan_arrays([SubgroupLattice.of(a)], bound, workers=workers)
    _, idx = res.domain()
    seen = set(np.unique(idx[:, 0]).tolist())
    Z = data.z_bound
    divs = [y for y in range(1, Z + 1) if Z % y == 0]
    sep_bad = [y for y in divs if (y in seen) != (gcd(y, data.h_min) in seen)]
    z_bad = [h for h in range(1, h_cap + 1) if (h in seen) != (gcd(h, Z) in seen)]
    mism = [h for h in range(1, h_cap + 1) if in_image(a, h) != (h in seen)]
    return SeparationReport(data, bound, sorted(y for y in divs if y in seen), sep_bad, z_bad, mism)


def valuation_tuple(indices, ell: int) -> tuple:
    return tuple(valuation(int(x), ell) for x in indices)
