"""Exact integer row reduction used by the subgroup and congruence code.

Everything here works on plain lists of Python ints so results are exact
for arbitrarily large entries.  Matrices are lists of rows.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, lcm


def hermite_form(rows):
    """Row-style Hermite normal form with a unimodular transform.

    Returns ``(H, U, pivots)`` where ``U @ A == H``, the first
    ``len(pivots)`` rows of ``H`` are in echelon form with positive pivots
    (entries above a pivot reduced into ``[0, pivot)``) and the remaining
    rows are zero.  The rows of ``U`` past the rank span the left kernel.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for col in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][col]]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(A[i][col]))
            A[r], A[k] = A[k], A[r]
            U[r], U[k] = U[k], U[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][col]:
                    q = A[i][col] // A[r][col]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if A[i][col]:
                        clean = False
            if clean:
                break
        if A[r][col] == 0:
            continue
        if A[r][col] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        piv = A[r][col]
        for i in range(r):
            q = A[i][col] // piv
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        pivots.append(col)
        r += 1
    return A, U, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(hermite_form(rows)[2])


def left_kernel(rows):
    """Integer basis of ``{c : c @ A == 0}``."""
    _, U, pivots = hermite_form(rows)
    return U[len(pivots):]


def echelon_coordinates(H, pivots, v):
    """Rational coordinates of ``v`` in the echelon basis, or None."""
    coords = []
    for k, col in enumerate(pivots):
        acc = Fraction(v[col]) - sum(c * H[j][col] for j, c in enumerate(coords))
        coords.append(acc / H[k][col])
    for col in range(len(v)):
        if sum(c * H[j][col] for j, c in enumerate(coords)) != v[col]:
            return None
    return coords


def solve_rational(basis, v):
    """Coefficients ``u`` (Fractions) with ``sum(u_j * basis_j) == v``.

    ``basis`` must be linearly independent; returns None if ``v`` is not in
    their rational span.
    """
    if not basis:
        return [] if not any(v) else None
    H, U, pivots = hermite_form(basis)
    coords = echelon_coordinates(H, pivots, v)
    if coords is None:
        return None
    k = len(pivots)
    return [sum(coords[j] * U[j][i] for j in range(k)) for i in range(len(basis))]


def rank_mod(rows, q: int) -> int:
    """Rank over the prime field ``F_q``."""
    A = [[x % q for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][col], -1, q)
        A[r] = [(x * inv) % q for x in A[r]]
        for i in range(m):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [(x - f * y) % q for x, y in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r


def _det(M):
    # Bareiss fraction-free elimination
    M = [list(r) for r in M]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k]), None)
            if sw is None:
                return 0
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[-1][-1]


def invariant_factors(rows):
    """Smith invariant factors via determinantal divisors (small matrices)."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for ri in combinations(range(m), k):
            for ci in combinations(range(n), k):
                g = gcd(g, _det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def lattice_image(rows):
    """Modulus ``M`` and residue set of ``{(<y, v_j>)_j : y integral}``.

    ``rows`` are the linearly independent vectors ``v_j``.  The image is the
    full preimage of its reduction modulo ``M`` (the largest invariant
    factor); the residue set is found by letting ``y`` run over
    ``{0, ..., M-1}^dim``.
    """
    if not rows:
        return 1, {()}
    factors = invariant_factors(rows)
    if len(factors) < len(rows):
        raise ValueError("rows are linearly dependent")
    M = factors[-1]
    dim = len(rows[0])
    if M ** dim > 10 ** 7:
        raise ValueError(f"lattice image modulus {M} too large to enumerate")
    residues = set()
    for y in _box(M, dim):
        residues.add(tuple(sum(a * b for a, b in zip(y, v)) % M for v in rows))
    return M, residues


def _box(M, dim):
    if dim == 0:
        yield ()
        return
    for head in range(M):
        for tail in _box(M, dim - 1):
            yield (head,) + tail


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, v)
    return out
