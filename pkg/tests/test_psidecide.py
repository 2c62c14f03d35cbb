from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indexmap.psidecide import (
    NotCertified, check_pairs, ell_image_enumerated, estimate_separation, four_group_pattern,
    gaussian_four_group, gcd_reduce, independent_primes, kummer_membership,
    psi_ell_membership_maximal, rational_family, separation_data, valuation_array,
)
from indexmap.rank1image import in_image
from indexmap.ratmul import canonical_decompose
from indexmap.resindex import scan_arrays, valuation


def test_gaussian_examples():
    fam = gaussian_four_group()
    assert not psi_ell_membership_maximal(fam, (2, 2, 1, 1), 5).member
    v = psi_ell_membership_maximal(fam, (2, 1, 1, 1), 5, keep_systems=True)
    assert v.member and v.systems and v.systems[-1][1]


def test_gaussian_grid_matches_pattern():
    fam = gaussian_four_group()
    for t in itertools.product(range(4), repeat=4):
        assert psi_ell_membership_maximal(fam, t, 5).member == four_group_pattern(t), t


@pytest.mark.parametrize("ell,cap", [(3, 2), (5, 1), (7, 1)])
def test_decider_matches_enumeration(ell, cap):
    fam = gaussian_four_group()
    seen = ell_image_enumerated(fam, ell, cap)
    for t in itertools.product(range(cap + 1), repeat=4):
        assert (t in seen) == psi_ell_membership_maximal(fam, t, ell).member == four_group_pattern(t)


def test_independent_primes_everything():
    fam = independent_primes(3, 5, 7)
    seen = ell_image_enumerated(fam, 3, 1)
    assert len(seen) == 8
    assert all(psi_ell_membership_maximal(fam, t, 3).member for t in itertools.product(range(3), repeat=3))
    with pytest.raises(ValueError):
        independent_primes(3, 3)


def test_not_certified():
    with pytest.raises(NotCertified):
        psi_ell_membership_maximal(gaussian_four_group(), (0, 0, 0, 0), 2)
    fam = rational_family([[8], [27]])
    with pytest.raises(NotCertified):
        psi_ell_membership_maximal(fam, (0, 0), 3)
    with pytest.raises(ValueError):
        psi_ell_membership_maximal(gaussian_four_group(), (0, 0, 0), 3)


@pytest.mark.parametrize("groups,ell", [([3, 5, 15], 5), ([3, 5, 7], 7), ([[2, 3], 6, 5], 5), ([3, 45], 3)])
def test_rational_scan_consistency(groups, ell):
    """Every observed valuation tuple is accepted, and the common small ones occur."""
    fam = rational_family(groups)
    if not fam.is_certified(ell):
        pytest.skip("not saturated")
    res = scan_arrays(groups, 10 ** 5)
    _, idx = res.domain()
    tuples = {tuple(valuation(int(x), ell) for x in row) for row in idx}
    for t in (t for t in tuples if max(t) <= 2):
        assert psi_ell_membership_maximal(fam, t, ell).member, t
    for t in itertools.product(range(2), repeat=len(groups)):
        if psi_ell_membership_maximal(fam, t, ell).member:
            assert t in tuples, t


def test_valuation_array():
    assert valuation_array(np.array([0, 1, 3, 9, 18, 81]), 3, 3).tolist() == [3, 0, 1, 2, 2, 3]


def test_pattern():
    assert four_group_pattern((1, 1, 1, 1)) and four_group_pattern((0, 0, 0, 5))
    assert not four_group_pattern((0, 0, 1, 1)) and not four_group_pattern((0, 1, 2, 3))


def test_gcd_reduce_examples():
    assert gcd_reduce(2, 24) == 8
    assert gcd_reduce(-27, 9) == 3
    with pytest.raises(ValueError):
        gcd_reduce(2, 0)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, -3, 4, -4, 5, 12, -27, 64, Fraction(3, 4), 45, -100]), st.integers(1, 10 ** 4))
def test_gcd_reduce_idempotent(a, h):
    r = gcd_reduce(a, h)
    assert gcd_reduce(a, r) == r and h % r == 0
    assert in_image(a, h) == in_image(a, r)


@pytest.mark.parametrize("a", [2, 3, 4, 5, 7, -3, -4, 12, -27, 64, Fraction(3, 4), 45, 216, -100, 9, 81])
def test_separation_invariants(a):
    s = separation_data(a)
    c = canonical_decompose(a)
    assert s.h_min == 2 ** (c.d + 1) * c.D
    assert s.z_bound % s.h_min == 0
    assert s.e_ell[2] == c.d + int(c.T == 1)
    for ell, e in s.e_ell.items():
        if ell != 2:
            assert c.D % ell ** e == 0 and c.D % ell ** (e + 1)


def test_separation_two():
    assert separation_data(2).e_ell == {2: 1}
    assert separation_data(7).h_min == 2


def test_estimate_separation_reports():
    rep = estimate_separation(7, 10 ** 6, h_cap=40)
    assert rep.data.h_min == 2
    assert rep.z_discrepancies == [] and rep.closed_form_mismatch == []
    rep = estimate_separation(5, 10 ** 6, h_cap=40)
    assert rep.sep_discrepancies == [5]
    assert rep.z_discrepancies == [] and rep.closed_form_mismatch == []


def test_check_pairs():
    assert check_pairs(4, 24) == [2, 3]
    assert check_pairs(5, 5) == []
    with pytest.raises(ValueError):
        check_pairs(5, 12)


@pytest.mark.parametrize("a", [2, 3, 5, -3, 4, -4, 45, Fraction(3, 4), -27, 64, 8, 12, -100, 9])
def test_kummer_membership_matches_image(a):
    for h in range(1, 80):
        assert kummer_membership(a, h) == in_image(a, h), h
