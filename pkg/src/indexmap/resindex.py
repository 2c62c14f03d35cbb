"""Multiplicative orders and index tuples of rational groups modulo primes.

The scan engine sieves smallest prime factors once (in segments), then
splits the prime range into disjoint chunks that are processed by
independent workers.  Chunks are merged in increasing order, so results
do not depend on the number of workers.
"""
from __future__ import annotations

import csv
import json
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

import numpy as np

from . import _kernels
from .ratmul import SubgroupLattice, factor_rational

EXCLUDED_TAU = "divides_tau"
EXCLUDED_GENERATOR = "divides_generator"
_REASONS = {1: EXCLUDED_TAU, 2: EXCLUDED_GENERATOR}

MAX_BOUND = 2 ** 31 - 1
DEFAULT_CHUNK = 1 << 18
HISTOGRAM_CAP = 10 ** 4
LARGE = "large"


def default_workers() -> int:
    return max(1, int(os.environ.get("INDEXMAP_WORKERS", "1")))


class PrimeEngine:
    """Smallest-prime-factor table on ``[0, bound]``, sieved in segments."""

    def __init__(self, bound: int, segment: int = DEFAULT_CHUNK):
        if bound > MAX_BOUND:
            raise ValueError(f"bound {bound} exceeds {MAX_BOUND}")
        self.bound = int(bound)
        n = max(self.bound, 2)
        spf = np.zeros(n + 1, dtype=np.int32)
        base = _kernels.small_primes(int(n ** 0.5) + 1)
        for lo in range(2, n + 1, segment):
            _kernels.fill_spf_segment(spf, lo, min(lo + segment, n + 1), base)
        self.spf = spf

    def primes(self, lo: int = 2, hi: int | None = None) -> np.ndarray:
        """Primes in ``[lo, hi]``."""
        hi = self.bound if hi is None else min(hi, self.bound)
        lo = max(lo, 2)
        if hi < lo:
            return np.empty(0, np.int64)
        seg = self.spf[lo:hi + 1]
        return np.flatnonzero(seg == np.arange(lo, hi + 1)) + lo

    def factor(self, n: int) -> dict:
        if n < 1 or n > self.bound:
            raise ValueError(f"{n} outside sieve range")
        out = {}
        while n > 1:
            f = int(self.spf[n])
            while n % f == 0:
                n //= f
                out[f] = out.get(f, 0) + 1
        return out

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.bound and self.spf[n] == n


@lru_cache(maxsize=4)
def engine(bound: int) -> PrimeEngine:
    return PrimeEngine(bound)


def engine_for(bound: int) -> PrimeEngine:
    # reuse any cached engine that is large enough
    for b in _cached_bounds:
        if b >= bound:
            return engine(b)
    _cached_bounds.append(bound)
    _cached_bounds.sort()
    return engine(bound)


_cached_bounds: list = []


def multiplicative_order(g: int, p: int, factored_pm1: dict | None = None) -> int:
    """Order of ``g`` in ``(Z/p)^x``, dividing p-1 down one prime at a time."""
    g %= p
    if g == 0:
        raise ValueError(f"{g} is not invertible mod {p}")
    if factored_pm1 is None:
        from sympy import factorint

        factored_pm1 = factorint(p - 1)
    o = p - 1
    for q in factored_pm1:
        while o % q == 0 and pow(g, o // q, p) == 1:
            o //= q
    return o


def reduce_mod(a, p: int) -> int:
    f = factor_rational(a)
    return (f.sign * f.numerator * pow(f.denominator, -1, p)) % p


def as_group(x) -> SubgroupLattice:
    if isinstance(x, SubgroupLattice):
        return x
    if isinstance(x, (list, tuple)):
        return SubgroupLattice.of(*x)
    if isinstance(x, str) and "," in x:
        return SubgroupLattice.of(*[s for s in x.split(",") if s.strip()])
    return SubgroupLattice.of(x)


def bad_primes(groups) -> set:
    return {p for W in groups for g in W.generators for p in g.primes}


@dataclass(frozen=True)
class IndexRecord:
    p: int
    indices: tuple
    excluded: str | None = None


def index_tuple(groups, p: int) -> IndexRecord:
    """``(Ind_p W_1, ..., Ind_p W_n)`` or an exclusion record."""
    groups = [as_group(W) for W in groups]
    if p == 2:
        return IndexRecord(p, (), EXCLUDED_TAU)
    if p in bad_primes(groups):
        return IndexRecord(p, (), EXCLUDED_GENERATOR)
    from sympy import factorint

    fac = factorint(p - 1)
    out = []
    for W in groups:
        L = 1
        for g in W.generators:
            L = lcm(L, multiplicative_order(reduce_mod(g, p), p, fac))
        out.append((p - 1) // L)
    return IndexRecord(p, tuple(out))


def parse_filter(text) -> tuple | None:
    """``"1 mod 4"`` / ``(1, 4)`` -> ``(c, f)`` with gcd(c, f) == 1."""
    if text is None:
        return None
    if isinstance(text, str):
        parts = text.replace("mod", " ").split()
        if len(parts) != 2:
            raise ValueError(f"bad filter {text!r}; expected 'c mod f'")
        c, f = int(parts[0]), int(parts[1])
    else:
        c, f = text
    if f < 1 or gcd(c, f) != 1:
        raise ValueError(f"invalid congruence filter {c} mod {f}")
    return c % f, f


@dataclass
class ScanResult:
    primes: np.ndarray      # every prime <= bound passing the filter
    indices: np.ndarray     # shape (len(primes), n); 0 where excluded
    excluded: np.ndarray    # 0 = in domain, else reason code

    @property
    def mask(self) -> np.ndarray:
        return self.excluded == 0

    def domain(self):
        m = self.mask
        return self.primes[m], self.indices[m]

    def records(self, include_excluded: bool = False):
        for p, row, ex in zip(self.primes.tolist(), self.indices.tolist(), self.excluded.tolist()):
            if ex:
                if include_excluded:
                    yield IndexRecord(p, (), _REASONS[ex])
            else:
                yield IndexRecord(p, tuple(row))

    def restrict(self, bound: int) -> ScanResult:
        k = int(np.searchsorted(self.primes, bound, side="right"))
        return ScanResult(self.primes[:k], self.indices[:k], self.excluded[:k])


def _flatten(groups):
    fac_p, fac_e, gen_start, sign, grp_start = [], [], [0], [], [0]
    for W in groups:
        for g in W.generators:
            for p, e in g.exponents:
                fac_p.append(p)
                fac_e.append(e)
            gen_start.append(len(fac_p))
            sign.append(g.sign)
        grp_start.append(len(sign))
    arr = lambda x: np.asarray(x, dtype=np.int64)
    return arr(fac_p), arr(fac_e), arr(gen_start), arr(sign), arr(grp_start)


def _chunks(primes: np.ndarray, workers: int, chunk: int):
    n = len(primes)
    step = max(1, min(chunk, -(-n // max(workers, 1))))
    return [(i, min(i + step, n)) for i in range(0, n, step)]


def scan_arrays(groups, bound: int, filter=None, workers: int | None = None,
                chunk: int = DEFAULT_CHUNK) -> ScanResult:
    """Indices of all groups at every prime ``p <= bound`` (vectorised)."""
    groups = [as_group(W) for W in groups]
    for i, W in enumerate(groups):
        if not W.generators:
            raise ValueError(f"group {i} has no generators")
    flt = parse_filter(filter)
    eng = engine_for(max(bound, 2))
    primes = eng.primes(2, bound)
    if flt is not None:
        c, f = flt
        primes = primes[primes % f == c]
    n = len(groups)
    excluded = np.zeros(len(primes), np.int8)
    excluded[primes == 2] = 1
    bad = sorted(bad_primes(groups))
    if bad:
        excluded[(excluded == 0) & np.isin(primes, bad)] = 2
    indices = np.zeros((len(primes), n), np.int64)
    fac_p, fac_e, gen_start, sign, grp_start = _flatten(groups)
    live = np.flatnonzero(excluded == 0)
    lp = primes[live]
    out = np.zeros((len(lp), n), np.int64)

    def work(span):
        lo, hi = span
        ps = lp[lo:hi]
        res = np.zeros((len(ps), len(sign)), np.int64)
        _kernels.rational_residues(ps, fac_p, fac_e, gen_start, sign, res)
        _kernels.group_indices(ps, eng.spf, res, grp_start, out[lo:hi])

    spans = _chunks(lp, workers or default_workers(), chunk)
    nw = workers or default_workers()
    if nw > 1 and len(spans) > 1:
        with ThreadPoolExecutor(nw) as pool:
            list(pool.map(work, spans))
    else:
        for s in spans:
            work(s)
    indices[live] = out
    return ScanResult(primes, indices, excluded)


def scan(groups, bound: int, filter=None, workers: int | None = None,
         include_excluded: bool = False):
    """Stream of ``IndexRecord`` for primes ``p <= bound`` in increasing order."""
    yield from scan_arrays(groups, bound, filter, workers).records(include_excluded)


def histogram(records, cap: int = HISTOGRAM_CAP) -> Counter:
    """Counts of index tuples; entries above ``cap`` are binned as ``"large"``."""
    if isinstance(records, ScanResult):
        _, idx = records.domain()
        if len(idx) == 0:
            return Counter()
        rows, counts = np.unique(idx, axis=0, return_counts=True)
        out = Counter()
        for r, c in zip(rows.tolist(), counts.tolist()):
            out[tuple(x if x <= cap else LARGE for x in r)] += c
        return out
    out = Counter()
    for rec in records:
        if rec.excluded is None:
            out[tuple(x if x <= cap else LARGE for x in rec.indices)] += 1
    return out


def merge_histograms(*hists) -> Counter:
    out = Counter()
    for h in hists:
        out.update(h)
    return out


def histogram_json(hist) -> str:
    keys = sorted(hist, key=lambda t: tuple((1, 0) if x == LARGE else (0, x) for x in t))
    return json.dumps({",".join(map(str, k)): hist[k] for k in keys}, indent=1)


def write_csv(records, path, n: int):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p"] + [f"ind_{i + 1}" for i in range(n)] + ["excluded_reason"])
        for rec in records:
            if rec.excluded:
                w.writerow([rec.p] + [""] * n + [rec.excluded])
            else:
                w.writerow([rec.p, *rec.indices, ""])


def valuation(n: int, ell: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def psi_ell(indices, ell: int) -> np.ndarray:
    """Coordinatewise ell-adic valuation of an index array."""
    a = np.asarray(indices, dtype=np.int64)
    v = np.zeros_like(a)
    cur = a.copy()
    while True:
        m = (cur % ell == 0) & (cur > 0)
        if not m.any():
            return v
        v[m] += 1
        cur[m] //= ell
