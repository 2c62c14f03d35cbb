"""Nonzero rationals as exponent vectors and finitely generated subgroups.

A rational is stored as a sign together with a sparse prime -> exponent
map.  A subgroup is a list of generators plus their integer exponent
matrix; torsion (roots of unity) is tracked separately, never as a column.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from sympy import factorint

from . import _lattice

DEFAULT_BIT_BOUND = 128
INFINITE = math.inf


def parse_rational(text) -> Fraction:
    """Accept ``"num/den"``, ``"-7"``, ints and Fractions."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


@dataclass(frozen=True)
class FactoredRational:
    sign: int
    exponents: tuple = ()  # sorted ((p, e), ...) with e != 0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        for p, e in self.exponents:
            if e == 0:
                raise ValueError(f"zero exponent stored for {p}")

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.exponents)

    @property
    def primes(self):
        return [p for p, _ in self.exponents]

    @property
    def value(self) -> Fraction:
        out = Fraction(self.sign)
        for p, e in self.exponents:
            out *= Fraction(p) ** e
        return out

    @property
    def numerator(self) -> int:
        return math.prod(p ** e for p, e in self.exponents if e > 0)

    @property
    def denominator(self) -> int:
        return math.prod(p ** -e for p, e in self.exponents if e < 0)

    def exponent_gcd(self) -> int:
        """gcd of the exponents of ``|a|`` (0 for ``a = +-1``)."""
        g = 0
        for _, e in self.exponents:
            g = gcd(g, e)
        return g

    def __mul__(self, other: FactoredRational) -> FactoredRational:
        exps = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + e
        return _make(self.sign * other.sign, exps)

    def __pow__(self, k: int) -> FactoredRational:
        return _make(self.sign ** (k % 2) if k >= 0 else self.sign ** (-k % 2),
                     {p: e * k for p, e in self.exponents})

    def __str__(self):
        return str(self.value)


def _make(sign: int, exps: dict) -> FactoredRational:
    return FactoredRational(sign, tuple(sorted((p, e) for p, e in exps.items() if e)))


def factor_rational(a, bit_bound: int = DEFAULT_BIT_BOUND) -> FactoredRational:
    """Exact factorization of a nonzero rational.

    >>> factor_rational(-100)
    FactoredRational(sign=-1, exponents=((2, 2), (5, 2)))
    """
    if isinstance(a, FactoredRational):
        return a
    q = parse_rational(a)
    if q == 0:
        raise ValueError("cannot factor zero")
    num, den = abs(q.numerator), q.denominator
    if max(num.bit_length(), den.bit_length()) > bit_bound:
        raise ValueError(f"{q} exceeds the {bit_bound}-bit factorization bound")
    exps = {}
    for p, e in factorint(num).items():
        exps[p] = e
    for p, e in factorint(den).items():
        exps[p] = exps.get(p, 0) - e
    return _make(1 if q > 0 else -1, exps)


@dataclass(frozen=True)
class SubgroupLattice:
    """Finitely generated subgroup of ``K^x`` as an exponent lattice.

    ``matrix`` has one row per generator and one column per label in
    ``columns`` (rational primes over Q).  ``units`` holds the torsion part
    of each generator as an exponent of a fixed root of unity of order
    ``unit_order`` (over Q: 0 for positive, 1 for negative generators).
    """

    generators: tuple
    columns: tuple
    matrix: tuple
    units: tuple
    unit_order: int = 2

    @classmethod
    def of(cls, *gens, bit_bound: int = DEFAULT_BIT_BOUND) -> SubgroupLattice:
        facs = [factor_rational(g, bit_bound) for g in gens]
        cols = tuple(sorted({p for f in facs for p in f.primes}))
        matrix = tuple(tuple(f.as_dict.get(p, 0) for p in cols) for f in facs)
        units = tuple(0 if f.sign > 0 else 1 for f in facs)
        return cls(tuple(facs), cols, matrix, units, 2)

    @classmethod
    def from_vectors(cls, rows, columns, units=None, unit_order=2, generators=None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        units = tuple(units) if units is not None else (0,) * len(rows)
        gens = tuple(generators) if generators is not None else rows
        return cls(gens, tuple(columns), rows, units, unit_order)

    def reindexed(self, columns) -> tuple:
        pos = {c: i for i, c in enumerate(self.columns)}
        return tuple(tuple(r[pos[c]] if c in pos else 0 for c in columns) for r in self.matrix)

    @cached_property
    def rank(self) -> int:
        return _lattice.rank(self.matrix) if self.matrix and self.columns else 0

    @cached_property
    def torsion_subgroup(self) -> int:
        """Generator (as a divisor of ``unit_order``) of the torsion part."""
        g = self.unit_order
        if not self.matrix:
            return g
        if not self.columns:
            kernel = [[int(i == j) for j in range(len(self.matrix))] for i in range(len(self.matrix))]
        else:
            kernel = _lattice.left_kernel(self.matrix)
        for c in kernel:
            g = gcd(g, sum(x * u for x, u in zip(c, self.units)))
        return g

    @property
    def torsion_order(self) -> int:
        return self.unit_order // self.torsion_subgroup

    @property
    def torsion_flag(self) -> bool:
        """Whether -1 lies in the group."""
        return self.torsion_order % 2 == 0

    def __len__(self):
        return len(self.generators)


def join(*groups: SubgroupLattice) -> SubgroupLattice:
    if not groups:
        return SubgroupLattice((), (), (), (), 2)
    w = groups[0].unit_order
    if any(g.unit_order != w for g in groups):
        raise ValueError("cannot join groups over different torsion models")
    cols = []
    for g in groups:
        for c in g.columns:
            if c not in cols:
                cols.append(c)
    try:
        cols.sort()
    except TypeError:
        pass
    rows, units, gens = [], [], []
    for g in groups:
        rows.extend(g.reindexed(cols))
        units.extend(g.units)
        gens.extend(g.generators)
    return SubgroupLattice(tuple(gens), tuple(cols), tuple(rows), tuple(units), w)


def rank(W: SubgroupLattice) -> int:
    return W.rank


def power_membership(W: SubgroupLattice, w, unit: int | None = None):
    """Smallest ``z >= 1`` with ``w**z`` in ``W``, or ``INFINITE``.

    ``w`` is a rational (any form accepted by ``factor_rational``) or, for
    non-rational lattices, an exponent mapping over ``W.columns`` together
    with ``unit``.
    """
    if isinstance(w, dict):
        exps, u = w, (unit or 0)
    else:
        f = factor_rational(w)
        exps, u = f.as_dict, (0 if f.sign > 0 else 1)
    if any(p not in W.columns for p, e in exps.items() if e):
        return INFINITE
    v = [exps.get(c, 0) for c in W.columns]
    wo = W.unit_order
    if not W.columns or not W.matrix:
        if any(v):
            return INFINITE
        z0, sigma0 = 1, 0
    else:
        H, U, pivots = _lattice.hermite_form(W.matrix)
        coords = _lattice.echelon_coordinates(H, pivots, v)
        if coords is None:
            return INFINITE
        z0 = _lattice.lcm_all(c.denominator for c in coords)
        ints = [int(c * z0) for c in coords]
        combo = [sum(ints[j] * U[j][i] for j in range(len(ints))) for i in range(len(W.matrix))]
        sigma0 = sum(c * x for c, x in zip(combo, W.units))
    # torsion discrepancy between w^(k z0) and the lattice element k*z0*v
    hsub = W.torsion_subgroup
    delta = (z0 * u - sigma0) % wo
    k = 1
    while (k * delta) % gcd(hsub, wo) != 0:
        k += 1
    return z0 * k


def is_separated(groups) -> bool:
    """True iff removing any one group strictly lowers the joint rank."""
    groups = list(groups)
    for i, g in enumerate(groups):
        if g.rank == 0:
            raise ValueError(f"group {i} has rank 0")
    total = join(*groups).rank
    for i in range(len(groups)):
        rest = groups[:i] + groups[i + 1:]
        if join(*rest).rank >= total:
            return False
    return True


def is_cube(a) -> bool:
    f = factor_rational(a)
    return all(e % 3 == 0 for _, e in f.exponents)


@dataclass(frozen=True)
class CanonicalDecomposition:
    """``a = (-1)^epsilon * (b^2 * 2^delta * T)^(2^d)`` with derived D, E, Z."""

    a: Fraction
    epsilon: int
    b: Fraction
    delta: int
    T: int
    d: int
    D: int
    E: int = field(init=False)
    Z: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "E", max(3 * self.delta, self.d + 2))
        object.__setattr__(self, "Z", 2 ** self.E * math.lcm(abs(self.T), self.D))

    def reconstruct(self) -> Fraction:
        base = self.b ** 2 * 2 ** self.delta * self.T
        return (-1) ** self.epsilon * base ** (2 ** self.d)

    @property
    def base(self) -> Fraction:
        """The signed element ``b^2 2^delta T`` whose ``2^d`` power is ``+-a``."""
        return self.b ** 2 * 2 ** self.delta * self.T

    @property
    def squarefree_part(self) -> int:
        """Squarefree integer ``2^delta T``; its square root generates Q(sqrt(base))."""
        return 2 ** self.delta * self.T

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "b_num": self.b.numerator,
            "b_den": self.b.denominator,
            "delta": self.delta,
            "T": self.T,
            "d": self.d,
            "D": self.D,
            "E": self.E,
            "Z": self.Z,
        }


def signed_prime(p: int) -> int:
    return p if p % 4 == 1 else -p


def canonical_decompose(a) -> CanonicalDecomposition:
    f = factor_rational(a)
    if not f.exponents:
        raise ValueError("a must not be 0 or +-1")
    g = f.exponent_gcd()
    d = (g & -g).bit_length() - 1
    D = g >> d
    reduced = {p: e >> d for p, e in f.exponents}
    delta = reduced.get(2, 0) % 2
    T = 1
    b = Fraction(1)
    for p, e in reduced.items():
        odd = e % 2
        if p != 2 and odd:
            T *= signed_prime(p)
        b *= Fraction(p) ** ((e - odd) // 2)
    if d >= 1:
        epsilon = int(f.sign < 0)
    else:
        epsilon = int(f.sign != (1 if T > 0 else -1))
    return CanonicalDecomposition(f.value, epsilon, b, delta, T, d, D)
