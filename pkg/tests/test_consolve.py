from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from indexmap.consolve import (
    BudgetExceeded, CongruenceSystem, NotApplicable, Row, differential_check, dump, load,
    solvable_bruteforce, solvable_structured, solve,
)


def naive(sys: CongruenceSystem, side: int):
    """Plain itertools enumeration over [0, side)^dim using ``check``."""
    for y in itertools.product(range(side), repeat=sys.dim):
        if sys.check(y):
            return y
    return None


def test_empty_system():
    v = solvable_bruteforce(CongruenceSystem(5, 2))
    assert v.solvable and v.witness == (0, 0)


def test_single_strict_row():
    sys = CongruenceSystem(3, 1, (Row((1,), 0, 2, True),))
    v = solvable_bruteforce(sys)
    assert v.witness == (9,)


def test_contradiction():
    sys = CongruenceSystem(5, 1, (Row((1,), 0, 1), Row((1,), 1, 1)))
    assert not solvable_bruteforce(sys)
    assert not solvable_structured(sys)


def test_structured_large_prime():
    sys = CongruenceSystem(101, 2, (Row((1, 0), 0, 1, True), Row((0, 1), 0, 1, True), Row((1, 1), 0, 1, True)))
    assert solvable_structured(sys).solvable
    bad = CongruenceSystem(101, 2, (Row((1, 0), 0, 1), Row((0, 1), 0, 1), Row((1, 1), 0, 2, True)))
    # x = y = 0 mod 101 forces x + y = 0 mod 101; nothing forbids it being nonzero mod 101^2
    assert solvable_structured(bad).solvable
    worse = CongruenceSystem(101, 2, (Row((1, 0), 0, 2), Row((0, 1), 0, 2), Row((1, 1), 0, 1, True)))
    assert not solvable_structured(worse).solvable


def test_basis_maximises_exponent():
    """A deeper congruence on the same form decides the strict one."""
    for q in (3, 5, 101):
        sys = CongruenceSystem(q, 2, (Row((1, 0), 0, 2), Row((1, 0), 0, 1, True)))
        assert not solvable_structured(sys).solvable
        if q < 100:
            assert not solvable_bruteforce(sys).solvable


def test_not_applicable():
    with pytest.raises(NotApplicable):
        solvable_structured(CongruenceSystem(2, 1, (Row((1,), 0, 0, True), Row((1,), 1, 0, True))))
    with pytest.raises(NotApplicable):
        solvable_structured(CongruenceSystem(3, 2, (Row((1, 0), 0, 1), Row((0, 1), 0, 1), Row((3, 1), 0, 1))))
    with pytest.raises(NotApplicable):
        solvable_structured(CongruenceSystem(5, 1, (), residue_constraint=(10, [(1,)])))


def test_solve_falls_back():
    sys = CongruenceSystem(2, 1, (Row((1,), 0, 0, True), Row((1,), 1, 0, True)))
    v = solve(sys)
    assert v.method == "bruteforce" and any("declined" in n for n in v.notes)


def test_budget():
    with pytest.raises(BudgetExceeded):
        solvable_bruteforce(CongruenceSystem(101, 2, (Row((1, 0), 0, 2),)), budget=10 ** 6)


def test_validation():
    with pytest.raises(ValueError):
        CongruenceSystem(3, 2, (Row((1,), 0, 1),))
    with pytest.raises(ValueError):
        CongruenceSystem(3, 1, (Row((1,), 0, 13),))


row_st = st.builds(
    lambda v, c, e, s: Row(tuple(v), c, e, s),
    st.lists(st.integers(-3, 3), min_size=2, max_size=2), st.integers(-10, 10),
    st.integers(0, 2), st.booleans())
sys_st = st.builds(lambda q, rows: CongruenceSystem(q, 2, tuple(rows)),
                   st.sampled_from([2, 3, 5]), st.lists(row_st, max_size=4))


@settings(max_examples=150, deadline=None)
@given(sys_st)
def test_bruteforce_matches_naive(sys):
    v = solvable_bruteforce(sys)
    if v.solvable:
        assert sys.check(v.witness)
    side = sys.q ** (sys.max_e + 1)
    assert (naive(sys, side) is not None) == v.solvable


@settings(max_examples=150, deadline=None)
@given(sys_st)
def test_structured_agrees_when_applicable(sys):
    try:
        fast = solvable_structured(sys)
    except NotApplicable:
        return
    assert fast.solvable == solvable_bruteforce(sys).solvable


@settings(max_examples=100, deadline=None)
@given(sys_st, row_st)
def test_adding_rows_is_monotone(sys, extra):
    if not solvable_bruteforce(sys).solvable:
        assert not solvable_bruteforce(sys.with_rows(extra)).solvable


@settings(max_examples=80, deadline=None)
@given(sys_st, st.randoms(use_true_random=False))
def test_row_order_irrelevant(sys, rnd):
    rows = list(sys.rows)
    rnd.shuffle(rows)
    shuffled = CongruenceSystem(sys.q, sys.dim, tuple(rows))
    assert solvable_bruteforce(shuffled).solvable == solvable_bruteforce(sys).solvable


@settings(max_examples=80, deadline=None)
@given(sys_st, st.integers(0, 8))
def test_fixing_a_coordinate(sys, x0):
    """Pinning x0 by a row agrees with substituting it into every row."""
    pinned = sys.with_rows(Row((1, 0), x0, sys.max_e + 1))
    subst = CongruenceSystem(sys.q, 1, tuple(Row((r.v[1],), r.c - r.v[0] * x0, r.e, r.strict) for r in sys.rows))
    assert solvable_bruteforce(pinned).solvable == solvable_bruteforce(subst).solvable


@settings(max_examples=60, deadline=None)
@given(sys_st, st.sampled_from([2, 3, 4, 6, 9, 12]), st.data())
def test_residue_constraint_matches_naive(sys, M, data):
    allowed = data.draw(st.lists(st.tuples(st.integers(0, M - 1), st.integers(0, M - 1)), max_size=5))
    con = CongruenceSystem(sys.q, 2, sys.rows, (M, allowed))
    side = sys.q ** (sys.max_e + 2) * M
    assume(side <= 400)
    v = solvable_bruteforce(con)
    if v.solvable:
        assert con.check(v.witness)
    assert (naive(con, side) is not None) == v.solvable


def test_json_roundtrip(tmp_path):
    sys = CongruenceSystem(7, 2, (Row((1, -2), 3, 2, True), Row((0, 1), 1, 0)), (6, [(1, 2), (5, 5)]))
    assert CongruenceSystem.from_json(sys.to_json()) == sys
    path = tmp_path / "s.json"
    dump(sys, path)
    assert load(path) == sys


def test_differential_harness():
    rep = differential_check(1, 1000)
    assert rep.discrepancies == []
    assert rep.checked > 500
    empty = differential_check(1, 0)
    assert (empty.checked, empty.not_applicable, empty.discrepancies) == (0, 0, [])


def test_differential_other_seed():
    assert differential_check(random.Random(7).randrange(10 ** 6), 300).discrepancies == []
