"""Compiled inner loops for the prime scans.

All values stay below 2**31 so products of two residues fit in int64.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def small_primes(n):
    if n < 2:
        return np.empty(0, np.int64)
    flags = np.ones(n + 1, np.bool_)
    flags[:2] = False
    i = 2
    while i * i <= n:
        if flags[i]:
            flags[i * i::i] = False
        i += 1
    return np.flatnonzero(flags).astype(np.int64)


@njit(cache=True, nogil=True)
def fill_spf_segment(spf, lo, hi, base):
    for p in base:
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        for m in range(start, hi, p):
            if spf[m] == 0:
                spf[m] = p
    for n in range(lo, hi):
        if spf[n] == 0:
            spf[n] = n


@njit(cache=True, inline="always")
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, inline="always")
def powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = (r * b) % m
        b = (b * b) % m
        e >>= 1
    return r


@njit(cache=True, inline="always")
def _distinct_factors(n, spf, out):
    k = 0
    while n > 1:
        f = spf[n]
        out[k] = f
        k += 1
        while n % f == 0:
            n //= f
    return k


@njit(cache=True, inline="always")
def _order(r, p, pf, k):
    o = p - 1
    for j in range(k):
        f = pf[j]
        while o % f == 0 and powmod(r, o // f, p) == 1:
            o //= f
    return o


@njit(cache=True, nogil=True)
def rational_residues(primes, fac_primes, fac_exps, gen_start, gen_sign, out):
    """Reduce each generator (given by its factorization) modulo each prime.

    Writes 0 where the prime divides the generator's numerator or
    denominator.
    """
    ngen = len(gen_start) - 1
    for idx in range(len(primes)):
        p = primes[idx]
        for g in range(ngen):
            r = 1
            for j in range(gen_start[g], gen_start[g + 1]):
                b = fac_primes[j] % p
                if b == 0:
                    r = 0
                    break
                e = fac_exps[j]
                if e < 0:
                    b = powmod(b, p - 2, p)
                    e = -e
                r = (r * powmod(b, e % (p - 1), p)) % p
            if r != 0 and gen_sign[g] < 0:
                r = p - r
            out[idx, g] = r


@njit(cache=True, nogil=True)
def gaussian_split_residues(primes, re, im, out, roots):
    """Reduce Gaussian integers at the prime (p, i - r), r the smaller root."""
    for idx in range(len(primes)):
        p = primes[idx]
        c = 2
        while powmod(c, (p - 1) // 2, p) != p - 1:
            c += 1
        r = powmod(c, (p - 1) // 4, p)
        if p - r < r:
            r = p - r
        roots[idx] = r
        for g in range(len(re)):
            out[idx, g] = ((re[g] % p) + (im[g] % p) * r) % p


@njit(cache=True, nogil=True)
def group_indices(primes, spf, residues, grp_start, out):
    """Index of each group (generated by columns of ``residues``) mod p.

    Rows whose residues contain a 0 are skipped (left untouched).
    """
    pf = np.empty(40, np.int64)
    ngroups = len(grp_start) - 1
    for idx in range(len(primes)):
        p = primes[idx]
        skip = False
        for g in range(residues.shape[1]):
            if residues[idx, g] == 0:
                skip = True
        if skip:
            continue
        k = _distinct_factors(p - 1, spf, pf)
        for i in range(ngroups):
            L = 1
            for g in range(grp_start[i], grp_start[i + 1]):
                o = _order(residues[idx, g], p, pf, k)
                L = L // _gcd(L, o) * o
            out[idx, i] = (p - 1) // L


@njit(cache=True, nogil=True)
def nth_power_count(primes, residues, n):
    """Number of primes p (all p = 1 mod n) at which the residue is an n-th power."""
    c = 0
    for idx in range(len(primes)):
        p = primes[idx]
        r = residues[idx]
        if r != 0 and powmod(r, (p - 1) // n, p) == 1:
            c += 1
    return c
