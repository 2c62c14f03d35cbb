"""Index maps over the Gaussian rationals Q(i).

Sites are primes of Z[i] away from 2:

* split ``p = 1 (mod 4)``: the prime ``(p, i - r)`` with ``r`` the smaller
  root of ``x^2 + 1`` mod p (the conjugate site uses ``p - r``); the
  residue field is F_p and ``a + bi`` reduces to ``a + b r``.
* inert ``p = 3 (mod 4)``: the residue field is Z[i]/(p) = F_(p^2), kept
  as pairs mod p with ``i^2 = -1``.

The index of a group at a site is ``(N - 1) / lcm(orders)``.
"""
from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from math import gcd, lcm

import numpy as np
from sympy import factorint, isprime

from . import _kernels
from .ratmul import SubgroupLattice
from .resindex import engine_for, psi_ell

SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"


@dataclass(frozen=True)
class GaussianInteger:
    re: int
    im: int = 0

    @property
    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __mul__(self, other):
        if isinstance(other, int):
            other = GaussianInteger(other)
        return GaussianInteger(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GaussianInteger(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self):
        return GaussianInteger(self.re, -self.im)

    def divmod_exact(self, other):
        """``self / other`` if it lies in Z[i], else None."""
        n = other.norm
        num = self * other.conjugate()
        if num.re % n or num.im % n:
            return None
        return GaussianInteger(num.re // n, num.im // n)

    def normalized(self):
        """First-quadrant associate (re > 0, im >= 0) and the unit power k with self = i^k * it."""
        z, k = self, 0
        while not (z.re > 0 and z.im >= 0):
            z = GaussianInteger(z.im, -z.re)  # multiply by -i
            k += 1
        return z, k % 4

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        b = "" if abs(self.im) == 1 else str(abs(self.im))
        if self.re == 0:
            return f"{'-' if self.im < 0 else ''}{b}i"
        return f"{self.re}{'-' if self.im < 0 else '+'}{b}i"


_TERM = re.compile(r"\(([^()]*)\)(?:\^(\d+))?")


def parse_gaussian(text) -> GaussianInteger:
    """``"2+i"``, ``"3-2i"``, ``"-i"``, ``"7"`` or products like ``"(2+i)^2(3+2i)"``."""
    if isinstance(text, GaussianInteger):
        return text
    s = str(text).replace(" ", "")
    if s.startswith("("):
        out = GaussianInteger(1)
        pos = 0
        for m in _TERM.finditer(s):
            if m.start() != pos:
                raise ValueError(f"cannot parse {text!r}")
            out = out * parse_gaussian(m.group(1)) ** int(m.group(2) or 1)
            pos = m.end()
        if pos != len(s):
            raise ValueError(f"cannot parse {text!r}")
        return out
    m = re.fullmatch(r"([+-]?\d+)?(?:([+-]?)(\d*)i)?", s)
    if not m or not s:
        raise ValueError(f"cannot parse {text!r}")
    a = int(m.group(1) or 0)
    if "i" in s:
        b = int(m.group(3) or 1) * (-1 if m.group(2) == "-" else 1)
    else:
        b = 0
    return GaussianInteger(a, b)


def gaussian_prime_above(p: int) -> GaussianInteger:
    """Normalized Gaussian prime dividing the rational prime ``p``."""
    if p == 2:
        return GaussianInteger(1, 1)
    if p % 4 == 3:
        return GaussianInteger(p)
    r = _smaller_root(p)
    a, b = GaussianInteger(p), GaussianInteger(r, 1)
    while b.norm:  # Euclid in Z[i]
        n = b.norm
        num = a * b.conjugate()
        qt = GaussianInteger(_round_div(num.re, n), _round_div(num.im, n))
        a, b = b, GaussianInteger(a.re - (qt * b).re, a.im - (qt * b).im)
    return a.normalized()[0]


def _round_div(x: int, n: int) -> int:
    return (2 * x + n) // (2 * n)


def _smaller_root(p: int) -> int:
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    r = pow(c, (p - 1) // 4, p)
    return min(r, p - r)


def gaussian_factor(z) -> tuple:
    """``(k, {prime: e})`` with ``z = i^k * prod prime^e`` over normalized primes."""
    z = parse_gaussian(z)
    if z.norm == 0:
        raise ValueError("cannot factor zero")
    out = {}
    for p in sorted(factorint(z.norm)):
        cands = {gaussian_prime_above(p)}
        if p % 4 == 1:
            cands.add(next(iter(cands)).conjugate().normalized()[0])
        for pi in sorted(cands, key=lambda g: (g.re, g.im)):
            while True:
                w = z.divmod_exact(pi)
                if w is None:
                    break
                z = w
                out[pi] = out.get(pi, 0) + 1
    _, k = z.normalized()
    return k, out


def gaussian_lattice(*gens) -> SubgroupLattice:
    """Subgroup of Q(i)^x; columns are ``("gauss", re, im)`` prime labels, torsion i^k."""
    facs = [gaussian_factor(g) for g in gens]
    cols = sorted({("gauss", pi.re, pi.im) for _, f in facs for pi in f})
    rows = [tuple(f.get(GaussianInteger(c[1], c[2]), 0) for c in cols) for _, f in facs]
    return SubgroupLattice.from_vectors(rows, cols, [k for k, _ in facs], 4,
                                        tuple(parse_gaussian(g) for g in gens))


ALPHA = GaussianInteger(2, 1)
BETA = GaussianInteger(3, 2)
FOUR_GROUP = ((ALPHA,), (BETA,), (ALPHA * BETA,), (ALPHA ** 2 * BETA,))


@dataclass(frozen=True)
class GaussianPrimeSite:
    p: int
    kind: str
    root: int | None = None

    @property
    def norm(self) -> int:
        return self.p * self.p if self.kind == INERT else self.p

    @property
    def residue_order(self) -> int:
        return self.norm - 1


def site(p: int, conjugate: bool = False) -> GaussianPrimeSite:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return GaussianPrimeSite(2, RAMIFIED)
    if p % 4 == 3:
        return GaussianPrimeSite(p, INERT)
    r = _smaller_root(p)
    return GaussianPrimeSite(p, SPLIT, p - r if conjugate else r)


def _mul2(x, y, p):
    return ((x[0] * y[0] - x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)


def _pow2(x, e, p):
    out = (1, 0)
    while e:
        if e & 1:
            out = _mul2(out, x, p)
        x = _mul2(x, x, p)
        e >>= 1
    return out


def _order_generic(x, n, fac, mul_pow, one):
    o = n
    for q in fac:
        while o % q == 0 and mul_pow(x, o // q) == one:
            o //= q
    return o


def _as_groups(groups):
    return tuple(tuple(parse_gaussian(g) for g in (grp if isinstance(grp, (list, tuple)) else (grp,)))
                 for grp in groups)


def _bad_norm_primes(groups) -> set:
    return {p for grp in groups for g in grp for p in factorint(g.norm)}


@dataclass(frozen=True)
class GaussRecord:
    site: GaussianPrimeSite
    indices: tuple
    excluded: str | None = None


def reduce_and_index(groups, s: GaussianPrimeSite) -> GaussRecord:
    """Index tuple of the groups at one site, or an exclusion record."""
    groups = _as_groups(groups)
    if s.kind == RAMIFIED:
        return GaussRecord(s, (), "ramified")
    if s.p in _bad_norm_primes(groups):
        return GaussRecord(s, (), "divides_generator")
    p, n = s.p, s.residue_order
    if s.kind == SPLIT:
        fac = factorint(n)
        out = []
        for grp in groups:
            L = 1
            for g in grp:
                x = (g.re + g.im * s.root) % p
                L = lcm(L, _order_generic(x, n, fac, lambda y, e: pow(y, e, p), 1))
            out.append(n // L)
        return GaussRecord(s, tuple(out))
    fac = factorint(p - 1)
    for q, e in factorint(p + 1).items():
        fac[q] = fac.get(q, 0) + e
    out = []
    for grp in groups:
        L = 1
        for g in grp:
            x = (g.re % p, g.im % p)
            L = lcm(L, _order_generic(x, n, fac, lambda y, e: _pow2(y, e, p), (1, 0)))
        out.append(n // L)
    return GaussRecord(s, tuple(out))


@dataclass
class GaussScan:
    primes: np.ndarray
    kinds: np.ndarray     # 1 split, 3 inert
    roots: np.ndarray     # chosen root for split sites, 0 for inert
    indices: np.ndarray

    def records(self):
        for p, k, r, row in zip(self.primes.tolist(), self.kinds.tolist(), self.roots.tolist(),
                                self.indices.tolist()):
            kind = SPLIT if k == 1 else INERT
            yield GaussRecord(GaussianPrimeSite(p, kind, r if k == 1 else None), tuple(row))


def gauss_scan(groups=FOUR_GROUP, bound: int = 10 ** 5, conjugate: bool = False) -> GaussScan:
    """Indices at every non-excluded site of norm ``<= bound``, ordered by ``(p, kind)``."""
    groups = _as_groups(groups)
    bad = _bad_norm_primes(groups)
    flat = [g for grp in groups for g in grp]
    starts = np.cumsum([0] + [len(grp) for grp in groups]).astype(np.int64)
    eng = engine_for(max(bound, 2))
    ps = eng.primes(3, bound)
    split = ps[(ps % 4 == 1) & ~np.isin(ps, sorted(bad))]
    res = np.zeros((len(split), len(flat)), np.int64)
    roots = np.zeros(len(split), np.int64)
    re_ = np.asarray([g.re for g in flat], np.int64)
    im_ = np.asarray([g.im for g in flat], np.int64)
    _kernels.gaussian_split_residues(split, re_, im_, res, roots)
    if conjugate:
        roots = split - roots
        res = (re_[None, :] + im_[None, :] * roots[:, None]) % split[:, None]
    idx = np.zeros((len(split), len(groups)), np.int64)
    _kernels.group_indices(split, eng.spf, res, starts, idx)
    rows = [(int(p), 1, int(r), tuple(row)) for p, r, row in zip(split, roots, idx.tolist())]
    for p in eng.primes(3, int(bound ** 0.5)):
        p = int(p)
        if p % 4 == 3 and p not in bad:
            rows.append((p, 3, 0, reduce_and_index(groups, GaussianPrimeSite(p, INERT)).indices))
    rows.sort()
    n = len(groups)
    return GaussScan(np.asarray([r[0] for r in rows], np.int64), np.asarray([r[1] for r in rows], np.int8),
                     np.asarray([r[2] for r in rows], np.int64),
                     np.asarray([r[3] for r in rows], np.int64).reshape(len(rows), n))


def psi_q_scan(q: int, bound: int, groups=FOUR_GROUP, conjugate: bool = False) -> Counter:
    """Histogram of q-adic valuation tuples of the indices over sites of norm ``<= bound``."""
    if q == 2:
        raise ValueError("q = 2 is not supported: the pattern is only claimed for odd q")
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    if bound < 25:
        raise ValueError("bound must be at least 25")
    s = gauss_scan(groups, bound, conjugate)
    vals = psi_ell(s.indices, q)
    rows, counts = np.unique(vals, axis=0, return_counts=True)
    return Counter({tuple(int(x) for x in r): int(c) for r, c in zip(rows, counts)})


def write_csv(scan: GaussScan, path):
    n = scan.indices.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "kind", "root"] + [f"ind_{i + 1}" for i in range(n)])
        for rec in scan.records():
            w.writerow([rec.site.p, rec.site.kind, rec.site.root if rec.site.root is not None else "",
                        *rec.indices])
