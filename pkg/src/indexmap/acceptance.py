"""The eleven acceptance checks, shared by the test suite and ``indexmap reproduce``.

``bound`` is the small scan bound (10**6 by default); checks that need a
longer scan use ``10 * bound``.  Scans are computed once and restricted.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import consolve, density, gaussidx, kummerdeg, psidecide, rank1image
from .resindex import index_tuple, scan_arrays

FIXTURE_A = (2, 3, 4, 5, 8, -3, -4, -27, -100, 12)
ZERO_FIXTURE_A = (2, 4, -100, -3, -27, 5, 8)
KUMMER_GRID = [(a, n, m) for a in (2, 4, 5, -3) for n in (2, 4, 8) for m in (8, 24, 40) if m % n == 0]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f}s)"


class Context:
    def __init__(self, bound: int = 10 ** 6, workers: int | None = None):
        self.bound = bound
        self.big = 10 * bound
        self.workers = workers

    @lru_cache(maxsize=None)
    def scan(self, a, bound: int):
        if bound < self.big:
            return self.scan(a, self.big).restrict(bound)
        return scan_arrays([a], bound, workers=self.workers)

    def indices(self, a, bound: int) -> np.ndarray:
        return self.scan(a, bound).domain()[1][:, 0]


def c1(ctx: Context) -> CriterionResult:
    wit = {p: index_tuple([2], p).indices[0] for p in (3, 7, 113, 73)}
    seen = set(np.unique(ctx.indices(2, ctx.bound)).tolist())
    missing = [h for h in range(1, 21) if h not in seen]
    ok = wit == {3: 1, 7: 2, 113: 4, 73: 8} and not missing
    return CriterionResult(1, "surjectivity witnesses for a = 2", ok, {"witnesses": wit, "missing": missing})


def c2(ctx: Context) -> CriterionResult:
    viol = {}
    for a in FIXTURE_A:
        sets = rank1image.exceptional_sets(a)
        vals = np.unique(ctx.indices(a, ctx.bound)).tolist()
        bad = [h for h in vals if not rank1image.in_image(a, h, sets)]
        if bad:
            viol[a] = bad[:10]
    return CriterionResult(2, "exceptional sets never attained (p <= bound)", not viol, {"violations": viol})


def c3(ctx: Context) -> CriterionResult:
    missing = {}
    for a in FIXTURE_A:
        seen = set(np.unique(ctx.indices(a, ctx.big)).tolist())
        miss = [h for h in range(1, 31) if rank1image.in_image(a, h) and h not in seen]
        if miss:
            missing[a] = miss
    return CriterionResult(3, "every allowed h <= 30 realised (p <= 10*bound)", not missing, {"missing": missing})


def c4(ctx: Context) -> CriterionResult:
    small = np.unique(ctx.indices(-100, ctx.bound))
    hits10 = sorted(int(h) for h in small if h % 20 == 10)
    big = np.unique(ctx.indices(-100, ctx.big))
    classes = {int(h) % 20 for h in big if h <= 40}
    want = set(range(20)) - {10}
    ok = not hits10 and classes == want
    return CriterionResult(4, "a = -100 avoids 10 mod 20 and hits every other class", ok,
                           {"hits_10_mod_20": hits10[:10], "missing_classes": sorted(want - classes)})


def c5(ctx: Context) -> CriterionResult:
    hist = gaussidx.psi_q_scan(5, ctx.bound)
    viol = [t for t in hist if not psidecide.four_group_pattern(t)]
    need = [(1, 1, 1, 1), (2, 1, 1, 1)]
    ok = not viol and all(t in hist for t in need)
    return CriterionResult(5, "Gaussian 4-group pattern at q = 5", ok,
                           {"violations": viol, "observed": {str(t): hist.get(t, 0) for t in need},
                            "sites": sum(hist.values())})


def c6(ctx: Context) -> CriterionResult:
    d = density.truncated_density_rank1(2, 1, 50)
    emp = density.empirical_density([2], (1,), ctx.big, workers=ctx.workers)
    gap = abs(emp.ratio - float(d))
    band = Fraction(3739, 10000) <= d <= Fraction(3741, 10000)
    return CriterionResult(6, "density of Ind_p(2) = 1 vs truncation at t = 50", band and gap <= 0.005,
                           {"truncated": float(d), "in_band": band, "empirical": emp.ratio, "gap": gap})


def c7(ctx: Context) -> CriterionResult:
    bad = []
    checked = 0
    for a in ZERO_FIXTURE_A:
        vals = ctx.indices(a, ctx.bound)
        for h in range(1, 25):
            if rank1image.in_image(a, h):
                continue
            checked += 1
            cnt = int((vals == h).sum())
            d = density.truncated_density_rank1(a, h, 50)
            if cnt or d:
                bad.append((a, h, cnt, str(d)))
    return CriterionResult(7, "zero density exactly when h is not in the image", not bad,
                           {"pairs_checked": checked, "bad": bad})


def c8(ctx: Context) -> CriterionResult:
    rep = consolve.differential_check(1, 1000)
    return CriterionResult(8, "congruence solver differential test", not rep.discrepancies,
                           {"checked": rep.checked, "not_applicable": rep.not_applicable,
                            "skipped_budget": rep.skipped_budget, "discrepancies": len(rep.discrepancies)})


def c9(ctx: Context) -> CriterionResult:
    rep = density.sum_rule_check(2, 100, ctx.big, workers=ctx.workers)
    return CriterionResult(9, "sum rule over h <= 100 for a = 2", rep.passed, rep.to_json())


def c10(ctx: Context) -> CriterionResult:
    out = []
    for a, n, m in KUMMER_GRID:
        est = kummerdeg.degree_statistical(a, n, m, ctx.bound)
        exact = kummerdeg.field_degree(a, n, m)
        if exact not in est:
            out.append({"a": a, "n": n, "m": m, "exact": exact, "interval": [est.low, est.high]})
    return CriterionResult(10, "Kummer degrees inside the statistical intervals", not out,
                           {"cases": len(KUMMER_GRID), "outside": out})


def c11(ctx: Context) -> CriterionResult:
    detail = {}
    ok = True
    for a in (2, 5, -27):
        reduced = [h for h in range(1, 201)
                   if rank1image.in_image(a, h) != rank1image.in_image(a, psidecide.gcd_reduce(a, h))]
        kummer = [h for h in range(1, 201) if rank1image.in_image(a, h) != psidecide.kummer_membership(a, h)]
        seen = set(np.unique(ctx.indices(a, ctx.big)).tolist())
        emp = [h for h in range(1, 201) if (h in seen) != (psidecide.gcd_reduce(a, h) in seen)]
        detail[str(a)] = {"closed_form": reduced, "kummer": kummer, "empirical": emp}
        ok &= not reduced and not kummer and not emp
    sep = psidecide.separation_data(5)
    detail["sep_5"] = sep.to_json()
    ok &= sep.h_min == 2 and sep.e_ell.get(2) == 0
    return CriterionResult(11, "gcd reduction and separation data", ok, detail)


CRITERIA = (c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11)


def run_one(number: int, ctx: Context) -> CriterionResult:
    t = time.perf_counter()
    res = CRITERIA[number - 1](ctx)
    res.seconds = time.perf_counter() - t
    return res


def run_all(bound: int = 10 ** 6, workers: int | None = None, only=None, echo=None) -> list:
    ctx = Context(bound, workers)
    out = []
    for k in only or range(1, len(CRITERIA) + 1):
        res = run_one(k, ctx)
        if echo:
            echo(res.line())
        out.append(res)
    return out
