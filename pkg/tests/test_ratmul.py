from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indexmap.ratmul import (
    INFINITE, SubgroupLattice, canonical_decompose, factor_rational, is_cube, is_separated,
    join, parse_rational, power_membership, rank,
)

rationals = st.builds(
    lambda n, d, s: Fraction(s * n, d),
    st.integers(1, 5000), st.integers(1, 500), st.sampled_from([1, -1]),
).filter(lambda q: q not in (1, -1))


def test_factor_examples():
    assert factor_rational(-100).sign == -1
    assert factor_rational(-100).as_dict == {2: 2, 5: 2}
    one = factor_rational(1)
    assert one.sign == 1 and one.exponents == ()
    assert factor_rational("8/9").as_dict == {2: 3, 3: -2}


def test_factor_errors():
    with pytest.raises(ValueError):
        factor_rational(0)
    with pytest.raises(ValueError):
        factor_rational(2 ** 200 + 1)
    assert factor_rational(2 ** 200, bit_bound=256).as_dict == {2: 200}


@given(rationals)
def test_factor_roundtrip(q):
    f = factor_rational(q)
    assert f.value == q
    assert [p for p, _ in f.exponents] == sorted(f.primes)


def test_rank_examples():
    assert rank(SubgroupLattice.of(2, 3)) == 2
    assert rank(SubgroupLattice.of(-1)) == 0
    assert rank(SubgroupLattice.of(2, 3, 6)) == 2


def test_power_membership_examples():
    assert power_membership(SubgroupLattice.of(2, 3), 6) == 1
    assert power_membership(SubgroupLattice.of(4), 2) == 2
    assert power_membership(SubgroupLattice.of(3), 2) is INFINITE
    # torsion: -1 is in <-2, 2>, and (-2)^1 needs the sign
    assert power_membership(SubgroupLattice.of(-2, 2), -1) == 1
    assert power_membership(SubgroupLattice.of(4), -2) == 2
    assert power_membership(SubgroupLattice.of(-4), 2) == 4


def _brute_membership(gens, w, zmax=50, span=30):
    """Smallest z <= zmax with w^z a product of generator powers, by enumeration."""
    facs = [factor_rational(g) for g in gens]
    cols = sorted({p for f in facs + [factor_rational(w)] for p in f.primes})
    M = np.array([[f.as_dict.get(p, 0) for p in cols] for f in facs], dtype=np.int64).reshape(len(facs), len(cols))
    signs = np.array([int(f.sign < 0) for f in facs])
    fw = factor_rational(w)
    wv = np.array([fw.as_dict.get(p, 0) for p in cols], dtype=np.int64)
    grid = np.array(list(itertools.product(range(-span, span + 1), repeat=len(gens))), dtype=np.int64)
    vecs = grid @ M
    par = (grid @ signs) % 2
    for z in range(1, zmax + 1):
        hit = (vecs == z * wv).all(axis=1) & (par == (z * int(fw.sign < 0)) % 2)
        if hit.any():
            return z
    return INFINITE


small = st.sampled_from([2, 3, 4, 6, 8, 9, 12, -2, -3, -4, -8, Fraction(1, 2), Fraction(4, 9), -27, 36])


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=2), small)
def test_power_membership_bruteforce(gens, w):
    z = power_membership(SubgroupLattice.of(*gens), w)
    assert z == _brute_membership(gens, w) or (z > 50 and _brute_membership(gens, w) is INFINITE)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=1, max_size=2), small, st.integers(1, 12))
def test_power_membership_powers(gens, w, k):
    W = SubgroupLattice.of(*gens)
    z = power_membership(W, w)
    zk = power_membership(W, factor_rational(w) ** k)
    if z is INFINITE:
        assert zk is INFINITE
    else:
        from math import gcd
        assert zk == z // gcd(k, z)


def test_membership_order_invariant():
    a = SubgroupLattice.of(12, -18, 5)
    b = SubgroupLattice.of(5, 12, -18)
    for w in (6, -6, 30, Fraction(2, 3), 7, -1):
        assert power_membership(a, w) == power_membership(b, w)


def test_is_separated_examples():
    assert is_separated([SubgroupLattice.of(2), SubgroupLattice.of(3)])
    assert not is_separated([SubgroupLattice.of(2), SubgroupLattice.of(3), SubgroupLattice.of(6)])
    with pytest.raises(ValueError):
        is_separated([SubgroupLattice.of(2), SubgroupLattice.of(-1)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.sampled_from([2, 3, 5, 6, 10, 15, 7, 12, 49]), min_size=1, max_size=2),
                min_size=2, max_size=4))
def test_rank_subadditive(gens):
    groups = [SubgroupLattice.of(*g) for g in gens]
    for g1, g2 in itertools.combinations(groups, 2):
        j = join(g1, g2).rank
        assert j <= g1.rank + g2.rank
    if is_separated(groups):
        # removing any group drops the rank; the same holds inside any subfamily
        for r in range(2, len(groups)):
            for sub in itertools.combinations(groups, r):
                assert is_separated(list(sub))


KNOWN_DECOMP = {
    2: dict(epsilon=0, b=1, delta=1, T=1, d=0, D=1, E=3, Z=8),
    -100: dict(epsilon=1, b=1, delta=1, T=5, d=1),
    -3: dict(epsilon=0, b=1, delta=0, T=-3, d=0),
    -27: dict(epsilon=0, b=3, delta=0, T=-3, d=0, D=3, Z=12),
}


@pytest.mark.parametrize("a", sorted(KNOWN_DECOMP))
def test_decomposition_examples(a):
    c = canonical_decompose(a)
    for k, v in KNOWN_DECOMP[a].items():
        assert getattr(c, k) == v, k


@pytest.mark.parametrize("a", [0, 1, -1])
def test_decomposition_rejects_units(a):
    with pytest.raises(ValueError):
        canonical_decompose(a)


@given(rationals)
def test_decomposition_roundtrip(a):
    c = canonical_decompose(a)
    assert c.reconstruct() == a
    assert c.delta == 1 or c.T != 1
    assert c.T == 1 or c.T % 4 == 1
    assert c.D % 2 == 1
    g = factor_rational(a).exponent_gcd()
    assert c.D == g >> ((g & -g).bit_length() - 1)
    assert canonical_decompose(c.reconstruct()) == c
    for p in factor_rational(abs(c.T)).primes:
        assert (c.T // p) % p != 0


def test_decomposition_json():
    assert canonical_decompose(-27).to_json() == {
        "epsilon": 0, "b_num": 3, "b_den": 1, "delta": 0, "T": -3, "d": 0, "D": 3, "E": 2, "Z": 12}


@given(rationals)
def test_cube_detection(a):
    num, den = abs(a.numerator), a.denominator
    rn, rd = round(num ** (1 / 3)), round(den ** (1 / 3))
    integer_cube = any((rn + i) ** 3 == num for i in (-1, 0, 1)) and any((rd + i) ** 3 == den for i in (-1, 0, 1))
    assert is_cube(a) == integer_cube


def test_parse_rational():
    assert parse_rational("-7/21") == Fraction(-1, 3)
    assert parse_rational(" 5 ") == 5
