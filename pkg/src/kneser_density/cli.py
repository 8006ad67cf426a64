"""Command-line front end.

    kneser-density build   --group pgl2 --q 9 [--output g.json]
    kneser-density orbits  --group psl2 --q 9 --k 3
    kneser-density density --group pgl2 --q 9 --k 3 --method all
    kneser-density bounds  --group psl2 --q 27 --k 3
    kneser-density clique  --group psl2 --q 9 --k 3 --orbit 0
    kneser-density verify  --case qeven-8 | --all | --list
    kneser-density array   --catalog K10_3

Exit status: 0 success, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .action import IntransitiveError, induce_ksets, restrict_to_orbit
from .bounds import coclique_bound
from .density import (ALL_METHODS, CASES, DEFAULT_TIME_LIMIT, array_rows, builtin_catalogs, compute_density,
                      density_array, frac_str, load_catalog, report_row, to_csv, to_markdown,
                      verify_paper_case)
from .perm import Group, GroupOverflowError, load_group, save_group
from .pgl import NotApplicableError, build_pgammal2, build_pgl2, build_psl2, build_psl_sigma, proj_line, triple_sign
from .scheme import eigen_table, union_spectrum
from .search import default_threads, max_intersecting_set

BUILDERS = {"pgl2": build_pgl2, "psl2": build_psl2, "psl-sigma": build_psl_sigma, "pgammal2": build_pgammal2}


class UsageError(Exception):
    pass


def _add_group_args(p: argparse.ArgumentParser, k: bool = True):
    g = p.add_argument_group("group selection")
    g.add_argument("--group", choices=sorted(BUILDERS), help="group family built over GF(q)")
    g.add_argument("--q", type=int, help="field order (prime power)")
    g.add_argument("--group-file", help="JSON group file (name, degree, generators)")
    if k:
        g.add_argument("--k", type=int, default=3, help="act on k-subsets (default 3)")
        g.add_argument("--orbit", type=int, help="restrict to one orbit (by least member)")


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT, help="seconds per search")
    p.add_argument("--threads", type=int, default=None, help="worker processes for the exact search")
    p.add_argument("--deterministic", action="store_true",
                   help="single-threaded canonical search; omit timings (byte-identical output)")


def _add_format(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kneser-density", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a group and summarize it (optionally write a group file)")
    _add_group_args(p, k=False)
    p.add_argument("--output", help="write the group as a JSON group file")
    _add_format(p)

    p = sub.add_parser("orbits", help="orbits on k-subsets")
    _add_group_args(p)
    _add_format(p)

    for name, helptext in (("density", "intersection density of an action"),
                           ("bounds", "spectrum and upper bounds only"),
                           ("clique", "exact maximum intersecting set only")):
        p = sub.add_parser(name, help=helptext)
        _add_group_args(p)
        if name != "clique":
            p.add_argument("--method", default="all" if name == "density" else "ratio,lp,weighted",
                           help=f"comma list from {', '.join(ALL_METHODS)} or 'all'")
        else:
            p.add_argument("--reduction", choices=("classes", "identity", "none"), default="classes")
        _add_run_args(p)
        _add_format(p)

    p = sub.add_parser("verify", help="run the registered reference cases")
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--case", action="append", help="case id (repeatable)")
    sel.add_argument("--all", action="store_true", help="every case (add --include-slow for slow ones)")
    sel.add_argument("--list", action="store_true", help="list case ids")
    p.add_argument("--include-slow", action="store_true")
    _add_run_args(p)
    _add_format(p)

    p = sub.add_parser("array", help="intersection density array from a group catalog")
    p.add_argument("--catalog", action="append", required=True,
                   help=f"catalog file or shipped name ({', '.join(builtin_catalogs())})")
    _add_run_args(p)
    _add_format(p)
    return ap


# --- helpers -------------------------------------------------------------------------

def _group(args) -> Group:
    if args.group_file and args.group:
        raise UsageError("--group and --group-file are mutually exclusive")
    if args.group_file:
        if args.q is not None:
            raise UsageError("--q only applies with --group")
        try:
            return load_group(args.group_file).build()
        except (OSError, ValueError) as exc:
            raise UsageError(f"--group-file {args.group_file}: {exc}") from None
    if not args.group:
        raise UsageError("choose --group (with --q) or --group-file")
    if args.q is None:
        raise UsageError("--group needs --q")
    try:
        return BUILDERS[args.group](args.q)
    except NotApplicableError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(f"--q {args.q}: {exc}") from None


def _action(args, G: Group):
    try:
        A = induce_ksets(G, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.orbit is not None:
        try:
            return restrict_to_orbit(A, args.orbit)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if not A.transitive:
        raise UsageError(f"{A.describe()} is intransitive ({len(A.orbit_positions())} orbits); "
                         "pass --orbit to pick one")
    return A


def _threads(args) -> int:
    if getattr(args, "deterministic", False):
        return 1
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        return args.threads
    return default_threads()


def _emit(out, fmt: str, payload, rows: list[dict] | None = None, columns=None):
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    elif fmt == "csv":
        out.write(to_csv(rows or [], columns))
    else:
        out.write(to_markdown(rows or [], columns))


# --- subcommands ---------------------------------------------------------------------

def cmd_build(args, out) -> int:
    G = _group(args)
    P = G.classes
    info = {"name": G.name, "degree": G.n, "order": G.order, "classes": len(P),
            "class_sizes": P.sizes, "generators": [g.cycle_string() for g in G.generators]}
    if args.output:
        save_group(G, args.output, {k: v for k, v in G.meta.items() if k in ("family", "q")})
        info["written"] = args.output
    row = {k: v for k, v in info.items() if k not in ("class_sizes", "generators")}
    _emit(out, args.format, info, [row])
    return 0


def cmd_orbits(args, out) -> int:
    G = _group(args)
    try:
        A = induce_ksets(G, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    q = G.meta.get("q")
    signed = q is not None and q % 2 == 1 and args.k == 3 and G.meta.get("family") in ("pgl2", "psl2")
    rows = []
    for i, pos in enumerate(A.orbit_positions()):
        first = [int(v) + 1 for v in A.domain[pos[0]]]
        row = {"orbit": i, "size": len(pos), "first": "{" + ",".join(map(str, first)) + "}"}
        if signed:
            row["triple_sign"] = triple_sign(proj_line(q).spec, *(int(v) for v in A.domain[pos[0]]))
        rows.append(row)
    _emit(out, args.format, {"group": G.name, "k": args.k, "N": A.N, "orbits": rows}, rows)
    return 0


def cmd_density(args, out) -> int:
    G = _group(args)
    A = _action(args, G)
    try:
        rep = compute_density(A, args.method, args.time_limit, threads=_threads(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(out, args.format, rep.to_dict(args.deterministic), [report_row(rep)])
    return 0


def cmd_bounds(args, out) -> int:
    G = _group(args)
    A = _action(args, G)
    t0 = time.monotonic()
    methods = [m for m in args.method.split(",") if m]
    if "all" in methods:
        methods = ["ratio", "lp", "weighted"]
    bad = set(methods) - {"ratio", "lp", "weighted"}
    if bad:
        raise UsageError(f"bounds does not run {sorted(bad)}")
    ET = eigen_table(G)
    T = A.derangements.derangement_classes()
    best, results = coclique_bound(ET, T, G.order, methods)
    spectrum = union_spectrum(ET, T)
    payload = {"group": G.name, "order": G.order, "action": A.describe(), "N": A.N,
               "derangement_classes": T,
               "spectrum": [[frac_str(v) if isinstance(v, Fraction) else f"float:{v!r}", m] for v, m in spectrum],
               "bounds": [r.to_dict() for r in results],
               "best": None if best is None else {"method": best.kind, "floor": best.floor,
                                                  "rho_upper": frac_str(Fraction(best.floor * A.N, G.order))}}
    if not args.deterministic:
        payload["elapsed"] = round(time.monotonic() - t0, 3)
    rows = [{"method": r.kind, "value": r.to_dict()["value"], "floor": r.floor, "exact": r.exact}
            for r in results]
    _emit(out, args.format, payload, rows)
    return 0


def cmd_clique(args, out) -> int:
    G = _group(args)
    A = _action(args, G)
    res = max_intersecting_set(A, time_limit=args.time_limit, reduction=args.reduction, threads=_threads(args))
    d = res.to_dict(G)
    if args.deterministic:
        d.pop("elapsed", None)
    payload = {"group": G.name, "action": A.describe(), "N": A.N, "order": G.order, **d,
               "rho_lower": frac_str(Fraction(res.size * A.N, G.order))}
    row = {"group": G.name, "action": A.describe(), "size": res.size, "optimal": res.optimal,
           "proof": res.proof, "rho": payload["rho_lower"]}
    _emit(out, args.format, payload, [row])
    return 0


def cmd_verify(args, out) -> int:
    if args.list:
        rows = [{"case": cid, "description": d, "slow": slow} for cid, (d, _, slow) in CASES.items()]
        _emit(out, args.format, rows, rows)
        return 0
    ids = list(CASES) if args.all else args.case
    if args.all and not args.include_slow:
        ids = [c for c in ids if not CASES[c][2]]
    unknown = [c for c in ids if c not in CASES]
    if unknown:
        raise UsageError(f"unknown case(s) {unknown}; see `verify --list`")
    results = [verify_paper_case(c, args.time_limit) for c in ids]
    rows = [{"case": r.case, "passed": r.passed,
             "failed_checks": ";".join(n for n, ok, _ in r.checks if not ok),
             **({} if args.deterministic else {"elapsed": round(r.elapsed, 3)})} for r in results]
    payload = [r.to_dict(args.deterministic) for r in results]
    _emit(out, args.format, payload if len(payload) > 1 else payload[0], rows)
    return 0 if all(r.passed for r in results) else 1


def cmd_array(args, out) -> int:
    arrays = []
    for name in args.catalog:
        try:
            cat = load_catalog(name)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise UsageError(f"catalog {name!r}: {exc}") from None
        arrays.append(density_array(cat, time_limit=args.time_limit))
    payload = [a.to_dict() for a in arrays]
    _emit(out, args.format, payload if len(payload) > 1 else payload[0], array_rows(arrays))
    return 0


COMMANDS = {"build": cmd_build, "orbits": cmd_orbits, "density": cmd_density, "bounds": cmd_bounds,
            "clique": cmd_clique, "verify": cmd_verify, "array": cmd_array}


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with 2, --help with 0
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, IntransitiveError) as exc:
        print(f"kneser-density {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except GroupOverflowError as exc:
        print(f"kneser-density {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
