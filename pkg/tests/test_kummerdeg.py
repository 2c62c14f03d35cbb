from __future__ import annotations

from math import gcd

import pytest
from hypothesis import given, settings, strategies as st
from sympy import divisors, totient

from indexmap.kummerdeg import (
    KummerQuery, degree, degree_statistical, field_degree, in_cyclotomic, quadratic_discriminant,
)


def test_degree_examples():
    assert degree(2, 8, 8) == 4
    assert degree(5, 5, 5) == 5
    assert degree(4, 4, 4) == 2
    for m in (1, 6, 40):
        assert degree(7, 1, m) == 1


def test_query_validation():
    with pytest.raises(ValueError):
        KummerQuery(2, 3, 8)
    with pytest.raises(ValueError):
        KummerQuery(-1, 2, 2)


@pytest.mark.parametrize("s", [2, 3, 5, -1, -3, 6, -6, 7, 13, -15, 10])
def test_quadratic_in_cyclotomic(s):
    """sqrt(s) lies in Q(zeta_m) exactly when the discriminant divides m (up to sign)."""
    disc = abs(quadratic_discriminant(s))
    for m in range(1, 130):
        if m % 4 == 2:
            continue
        assert in_cyclotomic(0, s, m) == (m % disc == 0)


def test_roots_of_unity_in_cyclotomic():
    for k in range(0, 5):
        for m in range(1, 70):
            want = (2 ** k) // gcd(2 ** k, 2) == 1 or m % 2 ** k == 0
            assert in_cyclotomic(k, 1, m) == want


def test_zeta8_sqrt2():
    # zeta_8 * sqrt(2) = 1 + i lies in Q(i)
    assert in_cyclotomic(3, 2, 4)
    assert not in_cyclotomic(0, 2, 4)
    assert in_cyclotomic(0, 2, 8)


@pytest.mark.parametrize("z", range(1, 61))
def test_sqrt5_maximality(z):
    n = 2 * z
    assert (degree(5, 2, n) == 1) == (n % 5 == 0)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 8, 9, -3, -4, -27, 12, 16, -64, 81, 36, 25]),
       st.sampled_from([2, 4, 8, 12, 16, 24, 40, 48, 60, 120]))
def test_tower_divisibility(a, m):
    for n in divisors(m):
        for n2 in divisors(n):
            assert degree(a, n, m) % degree(a, n2, m) == 0


def brute_degree_fraction(a, n, m, bound):
    """Counts over all p <= bound of p = 1 mod m and a an n-th power, by direct powering."""
    from sympy import primerange
    from fractions import Fraction
    num = total = 0
    A = Fraction(a)
    for p in primerange(2, bound + 1):
        total += 1
        if p == 2 or p % m != 1 or A.numerator % p == 0 or A.denominator % p == 0:
            continue
        r = A.numerator * pow(A.denominator, -1, p) % p
        num += pow(r, (p - 1) // n, p) == 1
    return num, total


@pytest.mark.parametrize("a,n,m", [(2, 8, 8), (5, 5, 5), (-3, 4, 12), (9, 6, 6), (-4, 4, 8)])
def test_statistical_oracle(a, n, m):
    est = degree_statistical(a, n, m, 10 ** 6)
    assert field_degree(a, n, m) in est
    num, total = brute_degree_fraction(a, n, m, 2 * 10 ** 5)
    small = degree_statistical(a, n, m, 2 * 10 ** 5, min_split=1)
    assert (small.split, small.total) == (num, total)


def test_statistical_trivial_n():
    est = degree_statistical(7, 1, 24, 10 ** 6)
    assert int(totient(24)) in est


def test_statistical_errors():
    with pytest.raises(ValueError):
        degree_statistical(2, 8, 8, 10 ** 4)
    with pytest.raises(ValueError):
        degree_statistical(2, 64, 64 * 9, 10 ** 5)
