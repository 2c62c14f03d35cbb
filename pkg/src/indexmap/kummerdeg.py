"""Degrees of rank-one Kummer extensions of cyclotomic fields over Q.

``degree(a, n, m)`` is ``[Q(zeta_m, a^(1/n)) : Q(zeta_m)]`` for ``n | m``.
It equals ``n / t`` where ``t`` is the largest divisor of ``n`` such that
``a`` is a ``t``-th power in ``Q(zeta_m)``.  Odd prime powers only see the
power content of ``a`` in Q.  The 2-part is decided exactly by testing
whether an element ``zeta_{2^k} * sqrt(s)`` lies in ``Q(zeta_m)`` through
the action of ``Gal(Q(zeta_N)/Q(zeta_m))`` on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

import numpy as np
from sympy import factorint, totient
from sympy.functions.combinatorial.numbers import kronecker_symbol

from . import _kernels
from .ratmul import canonical_decompose, factor_rational, parse_rational
from .resindex import engine_for


@dataclass(frozen=True)
class KummerQuery:
    a: object
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.m % self.n:
            raise ValueError(f"need n | m, got n={self.n}, m={self.m}")
        if parse_rational(self.a) in (0, 1, -1):
            raise ValueError("a must not be 0 or +-1")


def quadratic_discriminant(s: int) -> int:
    """Discriminant of Q(sqrt(s)) for squarefree ``s != 1``."""
    return s if s % 4 == 1 else 4 * s


@lru_cache(maxsize=4096)
def in_cyclotomic(k: int, s: int, m: int) -> bool:
    """Whether ``zeta_{2^k} * sqrt(s)`` lies in ``Q(zeta_m)``.

    ``s`` is a squarefree integer (``s = 1`` for a bare root of unity).
    Every ``sigma_c`` with ``c = 1 (mod m)`` must fix the element, where
    ``sigma_c(zeta) = zeta^c`` and ``sigma_c(sqrt(s)) = (D/c) sqrt(s)``.
    """
    disc = 1 if s == 1 else quadratic_discriminant(s)
    N = lcm(m, 2 ** k, abs(disc))
    half = 2 ** (k - 1) if k >= 1 else None
    for c in range(1, N, m):
        if gcd(c, N) != 1:
            continue
        rot = (c - 1) % (2 ** k)
        chi = 1 if disc == 1 else int(kronecker_symbol(disc, c))
        if rot == 0 and chi == 1:
            continue
        if half is not None and rot == half and chi == -1:
            continue
        return False
    return True


def has_two_power_root(a, t: int, m: int) -> bool:
    """Whether ``a`` is a ``2^t``-th power in ``Q(zeta_m)`` (``2^t | m``)."""
    if t == 0:
        return True
    c = canonical_decompose(a)
    if t <= c.d:
        # roots are zeta_{2^(t+1)}^eps times a rational
        return c.epsilon == 0 or in_cyclotomic(t + 1, 1, m)
    if t == c.d + 1:
        # roots are zeta_{2^(d+2)}^eps * sqrt(2^delta T) times a rational
        return in_cyclotomic(c.epsilon * (c.d + 2), c.squarefree_part, m)
    # a fourth root of a non-square is never abelian over Q
    return False


def _v(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def power_content(a, n: int, m: int) -> int:
    """Largest ``t | n`` with ``a`` a ``t``-th power in ``Q(zeta_m)``."""
    c = canonical_decompose(a)
    t = 1
    for ell, v in factorint(n).items():
        if ell == 2:
            k = 0
            while k < v and has_two_power_root(a, k + 1, m):
                k += 1
            t *= 2 ** k
        else:
            t *= ell ** min(v, _v(c.D, ell))
    return t


def degree(a, n: int, m: int) -> int:
    q = KummerQuery(a, n, m)
    return q.n // power_content(q.a, q.n, q.m)


def field_degree(a, n: int, m: int | None = None) -> int:
    """``[Q(zeta_m, a^(1/n)) : Q]`` (``m`` defaults to ``n``)."""
    m = n if m is None else m
    return int(totient(m)) * degree(a, n, m)


@dataclass(frozen=True)
class DegreeEstimate:
    query: KummerQuery
    bound: int
    split: int        # primes p <= X, p = 1 mod m, a an n-th power mod p
    total: int        # primes p <= X
    estimate: float   # total / split, estimates [Q(zeta_m, a^(1/n)) : Q]
    low: float
    high: float

    def __contains__(self, value) -> bool:
        return self.low <= value <= self.high

    def to_json(self) -> dict:
        return {"a": str(parse_rational(self.query.a)), "n": self.query.n, "m": self.query.m,
                "bound": self.bound, "split": self.split, "total": self.total,
                "estimate": self.estimate, "interval": [self.low, self.high]}


def degree_statistical(a, n: int, m: int, bound: int, sigmas: float = 3.0,
                       min_split: int = 30) -> DegreeEstimate:
    """Frobenius-count estimate of ``[Q(zeta_m, a^(1/n)) : Q]``.

    Counts primes that split completely (``p = 1 mod m`` and ``a`` an
    ``n``-th power mod ``p``); their density is the reciprocal degree.
    The interval is the binomial normal approximation at ``sigmas``
    standard deviations, inverted.
    """
    q = KummerQuery(a, n, m)
    if bound < 10 ** 5:
        raise ValueError("statistical degree needs bound >= 10**5")
    eng = engine_for(bound)
    primes = eng.primes(2, bound)
    total = len(primes)
    f = factor_rational(a)
    cand = primes[(primes % m == 1) & ~np.isin(primes, f.primes)]
    res = np.zeros((len(cand), 1), np.int64)
    fp = np.asarray([p for p, _ in f.exponents], np.int64)
    fe = np.asarray([e for _, e in f.exponents], np.int64)
    _kernels.rational_residues(cand, fp, fe, np.asarray([0, len(fp)], np.int64),
                               np.asarray([f.sign], np.int64), res)
    split = int(_kernels.nth_power_count(cand, res[:, 0].copy(), n)) if len(cand) else 0
    if split < min_split:
        raise ValueError(f"only {split} split primes up to {bound}; raise the bound")
    frac = split / total
    sd = math.sqrt(frac * (1 - frac) / total)
    lo_frac, hi_frac = frac - sigmas * sd, frac + sigmas * sd
    high = math.inf if lo_frac <= 0 else 1 / lo_frac
    return DegreeEstimate(q, bound, split, total, 1 / frac, 1 / hi_frac, high)
