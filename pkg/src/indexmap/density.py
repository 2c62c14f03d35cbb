"""Truncated densities, empirical densities and the sum rule.

For one rational ``a`` and a target index ``h``, the primes with
``Ind_p(a) = h`` have density ``sum_k mu(k) / [K_(hk) : Q]`` with
``K_n = Q(zeta_n, a^(1/n))``.  Truncating ``k`` to products of primes
``q <= t`` gives ``d_t``.  Primes not dividing ``2 |T| D h`` split off as
independent Euler factors ``1 - 1/(q(q-1))``, so only a finite inclusion
and exclusion over the remaining primes needs exact Kummer degrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from sympy import primefactors, primerange, totient

from .kummerdeg import degree
from .ratmul import canonical_decompose, parse_rational
from .resindex import as_group, parse_filter, scan_arrays


class RegimeError(ValueError):
    """The requested truncated density is outside the supported regime."""


def kummer_field_degree(a, n: int) -> int:
    """``[Q(zeta_n, a^(1/n)) : Q]``."""
    return int(totient(n)) * degree(a, n, n)


def entangled_primes(a, h: int = 1) -> list:
    c = canonical_decompose(a)
    return sorted(set(primefactors(2 * abs(c.T) * c.D * h)))


def _alternating(a, h: int, qs) -> Fraction:
    total = Fraction(0)
    for r in range(len(qs) + 1):
        for S in combinations(qs, r):
            total += Fraction((-1) ** r, kummer_field_degree(a, h * math.prod(S)))
    return total


def truncated_density_rank1(a, h: int, t: int) -> Fraction:
    """``d_t`` for ``Ind_p(a) = h``, exact."""
    if h < 1:
        raise ValueError("h must be positive")
    bad = entangled_primes(a, h)
    qs = [q for q in bad if q <= t]
    out = _alternating(a, h, qs)
    for q in primerange(2, t + 1):
        if q not in bad:
            out *= 1 - Fraction(1, q * (q - 1))
    return out


def truncated_density_rank1_direct(a, h: int, t: int) -> Fraction:
    """Same quantity by full inclusion and exclusion over all ``q <= t``."""
    return _alternating(a, h, list(primerange(2, t + 1)))


def truncated_density_maximal(rank_function, n: int, t: int, rank_mod=None) -> Fraction:
    """``d_t`` for all indices equal to 1, assuming maximal Kummer degrees.

    ``rank_function`` maps a tuple of group indices to the rank of their join.
    The local factor at ``q`` counts kernels modulo ``q``; pass
    ``rank_mod(S, q)`` when the joins need not be saturated at ``q``.
    """
    subsets = [S for r in range(1, n + 1) for S in combinations(range(n), r)]
    ranks = {S: rank_function(S) for S in subsets}
    out = Fraction(1)
    for q in primerange(2, t + 1):
        rk = ranks if rank_mod is None else {S: rank_mod(S, q) for S in subsets}
        out *= 1 + sum(Fraction((-1) ** len(S), (q - 1) * q ** rk[S]) for S in subsets)
    return out


def truncated_density(groups, h, t: int, assume_maximal: bool = False) -> Fraction:
    """Dispatch: exact rank-one formula, or the maximal-regime product."""
    groups = [as_group(g) for g in groups] if isinstance(groups, (list, tuple)) else [as_group(groups)]
    hs = (h,) if isinstance(h, int) else tuple(h)
    if len(groups) == 1 and len(groups[0].generators) == 1 and groups[0].rank == 1:
        return truncated_density_rank1(groups[0].generators[0].value, hs[0], t)
    if not assume_maximal:
        raise RegimeError("multi-group densities need a maximality certificate")
    if any(x != 1 for x in hs):
        raise RegimeError("the maximal-regime product covers only indices equal to 1")
    from ._lattice import rank_mod
    from .ratmul import join

    def joined(S):
        return join(*[groups[i] for i in S])

    return truncated_density_maximal(lambda S: joined(S).rank, len(groups), t,
                                     lambda S, q: rank_mod(joined(S).matrix, q))


@dataclass(frozen=True)
class Empirical:
    count: int
    total: int
    bound: int

    @property
    def ratio(self) -> float:
        return self.count / self.total if self.total else 0.0

    def interval(self, sigmas: float = 3.0) -> tuple:
        p, n = self.ratio, self.total
        sd = math.sqrt(p * (1 - p) / n) if n else 0.0
        return max(0.0, p - sigmas * sd), min(1.0, p + sigmas * sd)

    def to_json(self) -> dict:
        return {"count": self.count, "total": self.total, "bound": self.bound,
                "ratio": self.ratio, "interval": list(self.interval())}


def _target_mask(indices: np.ndarray, target) -> np.ndarray:
    if target is None or target == "all":
        return np.ones(len(indices), dtype=bool)
    if callable(target):
        return np.fromiter((bool(target(tuple(r))) for r in indices.tolist()), bool, len(indices))
    if isinstance(target, int):
        target = (target,)
    if isinstance(target, tuple) and all(isinstance(x, int) for x in target):
        return (indices == np.asarray(target)).all(axis=1)
    keys = {(x,) if isinstance(x, int) else tuple(x) for x in target}
    return np.fromiter((tuple(r) in keys for r in indices.tolist()), bool, len(indices))


def empirical_density(groups, target, bound: int, filter=None, workers=None) -> Empirical:
    """Share of domain primes ``p <= bound`` whose index tuple lies in ``target``.

    ``target`` is a tuple, a collection of tuples, a predicate, or ``"all"``.
    """
    if bound < 10 ** 4:
        raise ValueError("empirical densities need bound >= 10**4")
    groups = [as_group(g) for g in groups] if isinstance(groups, (list, tuple)) else [as_group(groups)]
    res = scan_arrays(groups, bound, parse_filter(filter), workers)
    _, idx = res.domain()
    return Empirical(int(_target_mask(idx, target).sum()), len(idx), bound)


@dataclass
class SumRule:
    a: Fraction
    h_cap: int
    bound: int
    per_h: dict
    total: int
    partial_sum: float
    union_ratio: float
    threshold: float

    @property
    def additive(self) -> bool:
        return sum(self.per_h.values()) == round(self.union_ratio * self.total)

    @property
    def passed(self) -> bool:
        return self.additive and self.threshold <= self.partial_sum <= 1

    def to_json(self) -> dict:
        return {"a": str(self.a), "h_cap": self.h_cap, "bound": self.bound, "total": self.total,
                "partial_sum": self.partial_sum, "union_ratio": self.union_ratio,
                "additive": self.additive, "threshold": self.threshold, "passed": self.passed}


def sum_rule_check(a, h_cap: int, bound: int, threshold: float = 0.95, workers=None) -> SumRule:
    """Sum over ``h <= h_cap`` of the empirical densities of ``Ind_p(a) = h``."""
    res = scan_arrays([as_group(a)], bound, workers=workers)
    _, idx = res.domain()
    col = idx[:, 0]
    n = len(col)
    per_h = {h: int(c) for h, c in zip(*np.unique(col[col <= h_cap], return_counts=True))}
    union = int((col <= h_cap).sum())
    partial = sum(c / n for c in per_h.values())
    return SumRule(parse_rational(a), h_cap, bound, per_h, n, partial, union / n, threshold)


@dataclass
class DensityReport:
    a: Fraction
    h: int
    truncated: dict = field(default_factory=dict)
    empirical: Empirical | None = None
    tolerance: float = 0.005

    @property
    def verdict(self) -> bool | None:
        if self.empirical is None or not self.truncated:
            return None
        t = max(self.truncated)
        return abs(self.empirical.ratio - float(self.truncated[t])) <= self.tolerance

    def to_json(self) -> dict:
        return {"a": str(self.a), "h": self.h,
                "truncated": {str(t): {"exact": str(v), "decimal": float(v)} for t, v in self.truncated.items()},
                "empirical": None if self.empirical is None else self.empirical.to_json(),
                "tolerance": self.tolerance, "agrees": self.verdict}


def density_report(a, h: int, ts=(50,), bound: int | None = None, tolerance: float = 0.005,
                   workers=None) -> DensityReport:
    rep = DensityReport(parse_rational(a), h, tolerance=tolerance)
    for t in ts:
        rep.truncated[t] = truncated_density_rank1(a, h, t)
    if bound is not None:
        rep.empirical = empirical_density([a], (h,), bound, workers=workers)
    return rep
