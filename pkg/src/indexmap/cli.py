"""Command-line front end: ``indexmap <command> [options]``.

Exit status is 0 on success, 1 when a check fails and 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import acceptance, consolve, density, gaussidx, kummerdeg, psidecide, rank1image, resindex
from .ratmul import canonical_decompose


@dataclass
class RunConfig:
    prime_bound: int = 10 ** 6
    workers: int | None = None
    seed: int = 1
    output_path: str | None = None
    format: str = "json"
    tolerances: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _emit(obj, cfg: RunConfig):
    text = json.dumps(obj, indent=1, sort_keys=False, default=str)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _config(args) -> RunConfig:
    return RunConfig(prime_bound=getattr(args, "bound", None) or 10 ** 6,
                     workers=getattr(args, "workers", None) or resindex.default_workers(),
                     seed=getattr(args, "seed", 1),
                     output_path=getattr(args, "out", None),
                     format=getattr(args, "format", None) or _infer_format(getattr(args, "out", None)))


def _infer_format(path) -> str:
    return "csv" if path and str(path).endswith(".csv") else "json"


def cmd_scan(args, cfg):
    groups = [resindex.as_group(g) for g in args.group]
    res = resindex.scan_arrays(groups, args.bound, args.filter, cfg.workers)
    if cfg.format == "csv":
        if not cfg.output_path:
            raise UsageError("--format csv needs --out")
        resindex.write_csv(res.records(include_excluded=True), cfg.output_path, len(groups))
    else:
        hist = resindex.histogram(res, cap=args.cap)
        text = resindex.histogram_json(hist)
        if cfg.output_path:
            with open(cfg.output_path, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return 0


def cmd_gauss_scan(args, cfg):
    hist = gaussidx.psi_q_scan(args.q, args.bound, conjugate=args.conjugate)
    if args.csv:
        gaussidx.write_csv(gaussidx.gauss_scan(bound=args.bound, conjugate=args.conjugate), args.csv)
    keys = sorted(hist)
    viol = [k for k in keys if not psidecide.four_group_pattern(k)]
    _emit({"q": args.q, "bound": args.bound, "conjugate": args.conjugate,
           "histogram": {",".join(map(str, k)): hist[k] for k in keys},
           "pattern_violations": [list(k) for k in viol]}, cfg)
    return 0


def cmd_image(args, cfg):
    desc = rank1image.image_descriptor(args.a)
    out = desc.to_json()
    out["decomposition"] = canonical_decompose(args.a).to_json()
    out["m"] = desc.source.m
    _emit(out, cfg)
    return 0


def cmd_image_check(args, cfg):
    member = rank1image.in_image(args.a, args.h)
    _emit({"a": args.a, "h": args.h, "in_image": member,
           "reduced": psidecide.gcd_reduce(args.a, args.h),
           "kummer_count_agrees": psidecide.kummer_membership(args.a, args.h) == member}, cfg)
    return 0


def cmd_decide_ell(args, cfg):
    target = tuple(int(x) for x in args.tuple.split(","))
    if args.fixture == "gaussian":
        fam = psidecide.gaussian_four_group()
    elif args.group and any("i" in g for g in args.group):
        fam = psidecide.gaussian_family([g.split(",") for g in args.group])
    elif args.group:
        fam = psidecide.rational_family([resindex.as_group(g) for g in args.group])
    else:
        raise UsageError("give --group (repeatable) or --fixture gaussian")
    try:
        v = psidecide.psi_ell_membership_maximal(fam, target, args.ell, keep_systems=True)
    except psidecide.NotCertified as exc:
        raise UsageError(str(exc)) from exc
    out = v.to_json()
    out["provenance"] = fam.provenance
    _emit(out, cfg)
    return 0


def cmd_solve(args, cfg):
    sys_ = consolve.load(args.file)
    if args.method == "bruteforce":
        v = consolve.solvable_bruteforce(sys_, args.budget)
    elif args.method == "structured":
        try:
            v = consolve.solvable_structured(sys_)
        except consolve.NotApplicable as exc:
            _emit({"applicable": False, "reason": str(exc)}, cfg)
            return 1
    else:
        v = consolve.solve(sys_, args.budget)
    _emit({"solvable": v.solvable, "witness": None if v.witness is None else list(v.witness),
           "method": v.method, "notes": v.notes}, cfg)
    return 0


def cmd_kummer(args, cfg):
    out = {"a": args.a, "n": args.n, "m": args.m, "degree": kummerdeg.degree(args.a, args.n, args.m),
           "field_degree": kummerdeg.field_degree(args.a, args.n, args.m)}
    status = 0
    if args.statistical:
        est = kummerdeg.degree_statistical(args.a, args.n, args.m, args.bound)
        out["statistical"] = est.to_json()
        out["agrees"] = out["field_degree"] in est
        status = 0 if out["agrees"] else 1
    _emit(out, cfg)
    return status


def cmd_density(args, cfg):
    rep = density.density_report(args.a, args.h, tuple(args.t), args.bound, args.tolerance, cfg.workers)
    _emit(rep.to_json(), cfg)
    return 0


def cmd_reproduce(args, cfg):
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(args.bound, cfg.workers, only, echo=print)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            json.dump([{"criterion": r.number, "title": r.title, "passed": r.passed,
                        "detail": r.detail} for r in results], fh, indent=1, default=str)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indexmap", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, help="scan workers (default: $INDEXMAP_WORKERS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="indices of rational groups modulo primes")
    s.add_argument("--group", action="append", required=True,
                   help="generators, comma separated; repeat for several groups")
    s.add_argument("--bound", type=int, default=10 ** 6)
    s.add_argument("--filter", help='restrict to primes "c mod f"')
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"), default=None)
    s.add_argument("--cap", type=int, default=resindex.HISTOGRAM_CAP)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("gauss-scan", help="q-adic index tuples of the Gaussian 4-group")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--bound", type=int, default=10 ** 6)
    s.add_argument("--conjugate", action="store_true", help="use the larger root at split primes")
    s.add_argument("--csv", help="also write per-site records")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gauss_scan)

    s = sub.add_parser("image", help="image of p -> Ind_p(a)")
    s.add_argument("--a", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_image)

    s = sub.add_parser("image-check", help="is h an index of a")
    s.add_argument("--a", required=True)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_image_check)

    s = sub.add_parser("decide-ell", help="ell-adic valuation tuple membership")
    s.add_argument("--group", action="append")
    s.add_argument("--fixture", choices=("gaussian",))
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--tuple", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_decide_ell)

    s = sub.add_parser("solve", help="solvability of a congruence system (JSON file)")
    s.add_argument("--file", required=True)
    s.add_argument("--method", choices=("auto", "bruteforce", "structured"), default="auto")
    s.add_argument("--budget", type=int, default=consolve.DEFAULT_BUDGET)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("kummer", help="degree of Q(zeta_m, a^(1/n)) over Q(zeta_m)")
    s.add_argument("--a", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--statistical", action="store_true")
    s.add_argument("--bound", type=int, default=10 ** 6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_kummer)

    s = sub.add_parser("density", help="truncated and empirical density of Ind_p(a) = h")
    s.add_argument("--a", required=True)
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--t", type=int, action="append", default=None)
    s.add_argument("--bound", type=int)
    s.add_argument("--tolerance", type=float, default=0.005)
    s.add_argument("--out")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("reproduce", help="run the acceptance checks")
    s.add_argument("--bound", type=int, default=10 ** 6)
    s.add_argument("--only", help="comma separated criterion numbers")
    s.add_argument("--out", help="write the detailed results as JSON")
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "t", "") is None:
        args.t = [50]
    cfg = _config(args)
    try:
        return args.func(args, cfg)
    except (UsageError, ValueError, consolve.BudgetExceeded) as exc:
        print(f"indexmap {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
