"""``quasiroots`` command line: enumerate, check, solve, verify, report.

Exit status: 0 success, 1 validation failure, 2 budget or convergence
exhaustion, 3 I/O or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fock
from .axioms import check_axioms
from .catalog import CatalogEntry, CatalogFile, dumps, known_labels, read_catalog, write_catalog, write_json
from .enumeration import DEFAULT_BUDGET_NODES, DEFAULT_MAX_ROOTS, enumerate_simple
from .errors import BudgetExceeded, QuasiRootError, SchemaError
from .geometry import LONG, QuasiRootSystem
from .named import cartan, named_system
from .solvers import (SolverConfig, an_all_solutions, itype_sign_orbit, number_from_json,
                      solve_itype, solve_multistart)
from .surd import Surd

EXIT_OK, EXIT_INVALID, EXIT_EXHAUSTED, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# inputs

def _parse_matrix(text: str):
    try:
        return [[int(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise CliError(f"bad matrix {text!r}: {exc}", EXIT_INVALID) from exc


def _named_entry(name: str, matrix: str | None = None, factors=None) -> CatalogEntry:
    if matrix is not None:
        system = named_system(name, _parse_matrix(matrix))
    elif factors:
        system = named_system(name, *factors)
    else:
        system = named_system(name)
    return CatalogEntry(system, {"kind": "named", "family": name})


def _load(args) -> CatalogFile:
    if getattr(args, "name", None):
        return CatalogFile([_named_entry(args.name, getattr(args, "matrix", None),
                                         getattr(args, "factors", None))])
    path = getattr(args, "input", None) or getattr(args, "system", None)
    if not path:
        raise CliError("give an input file or --name", EXIT_IO)
    return read_catalog(path)


def _select(cat: CatalogFile, which):
    if which is None:
        return list(cat.entries)
    if str(which).isdigit() and int(which) < len(cat.entries):
        return [cat.entries[int(which)]]
    hit = [e for e in cat.entries if e.key == which or e.system.name == which]
    if not hit:
        raise CliError(f"no entry {which!r}", EXIT_INVALID)
    return hit


def _pairs(text: str):
    try:
        return [tuple(int(v) for v in p.split(",")) for p in text.split(";") if p.strip()]
    except ValueError as exc:
        raise CliError(f"bad pairs {text!r}", EXIT_INVALID) from exc


def _emit(obj, out):
    if out:
        write_json(out, obj)
    else:
        sys.stdout.write(dumps(obj))


# ---------------------------------------------------------------------------
# commands

def cmd_enumerate(args) -> int:
    try:
        cat = enumerate_simple(args.dim, max_roots=args.max_roots, budget_nodes=args.budget_nodes)
        code = EXIT_OK
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        cat, code = exc.partial, EXIT_EXHAUSTED
    out = CatalogFile()
    labels = known_labels(args.dim)
    for s in cat.systems:
        e = CatalogEntry(s, {"kind": "enumerated"})
        if e.key in labels:
            e.system = QuasiRootSystem(s.dim, s.gram, labels[e.key])
        out.add(e)
    if args.out:
        write_catalog(args.out, out)
    else:
        sys.stdout.write(dumps(out.to_dict()))
    print(f"{len(out.entries)} simple systems of dimension {args.dim}", file=sys.stderr)
    if code == EXIT_OK and not cat.complete:
        code = EXIT_EXHAUSTED
    return code


def cmd_check(args) -> int:
    cat = _load(args)
    reports = []
    ok = True
    for e in cat.entries:
        rep = check_axioms(e.system)
        ok &= rep.ok
        reports.append({"key": e.key, "name": e.system.name, **rep.to_dict()})
    _emit({"schema": "qrs/1", "reports": reports}, None)
    return EXIT_OK if ok else EXIT_INVALID


def _is_itype(system) -> bool:
    G = system.matrix()
    n = system.size
    return n == system.dim >= 2 and all(x == LONG for x in system.lengths) and all(
        abs(int(G[i, j])) <= 1 for i in range(n) for j in range(n) if i != j)


def _is_named_an(system) -> bool:
    try:
        return system.gram == cartan("A", system.dim).gram
    except QuasiRootError:
        return False


def _solve_entry(e: CatalogEntry, method: str, cfg: SolverConfig):
    if method == "auto":
        if _is_itype(e.system):
            method = "itype"
        elif _is_named_an(e.system) and e.system.dim >= 3 and not e.gauge:
            method = "an"
        else:
            method = "newton"
    ps = e.polynomial_system()
    if method == "itype":
        if not _is_itype(e.system):
            raise CliError("itype needs only long roots with mutual products 0 or ±1", EXIT_INVALID)
        recs = []
        for r in solve_itype(e.system.gram, cfg):
            recs.extend(itype_sign_orbit(r, ps) if r.status == "accepted" else [r])
    elif method == "an":
        if not _is_named_an(e.system):
            raise CliError("the closed form needs the named A_n system (use --name A<n>)", EXIT_INVALID)
        recs = an_all_solutions(e.system.dim, ps)
    elif method == "newton":
        recs = solve_multistart(ps, cfg)
    else:
        raise CliError(f"unknown method {method!r}", EXIT_INVALID)
    return ps, recs, method


def cmd_solve(args) -> int:
    cat = _load(args)
    cfg = SolverConfig(seed=args.seed, starts=args.starts)
    entries = _select(cat, args.entry)
    code = EXIT_OK
    for e in entries:
        if args.gauge:
            e.gauge = [int(v) for v in args.gauge.split(",")]
        ps, recs, used = _solve_entry(e, args.method, cfg)
        added = e.add_solutions(recs, ps)
        nontrivial = [r for r in recs if r.status == "accepted" and abs(r.c) > 0 and abs(r.c - e.system.dim) > 0]
        charges = sorted({_charge_str(r.central_charge) for r in recs if r.status == "accepted"})
        print(f"{e.name}: {len(recs)} records via {used}, {added} new; c in {{{', '.join(charges)}}}",
              file=sys.stderr)
        if not nontrivial:
            code = EXIT_EXHAUSTED
    if args.out:
        write_catalog(args.out, cat)
    else:
        sys.stdout.write(dumps(cat.to_dict()))
    return code


def cmd_verify(args) -> int:
    cat = _load(args)
    entries = _select(cat, args.entry)
    if len(entries) != 1:
        raise CliError("verify needs exactly one entry; pass --entry", EXIT_INVALID)
    e = entries[0]
    if args.solution:
        sol_cat = read_catalog(args.solution)
        src = sol_cat.find(e.key) or (sol_cat.entries[0] if len(sol_cat.entries) == 1 else None)
        if src is None:
            raise SchemaError("solution file has no entry for this system")
        e.solutions, e.variables, e.gauge = src.solutions, src.variables, src.gauge
        e.cocycle = src.cocycle or e.cocycle
    ps = e.polynomial_system()
    if e.variables and e.variables != ps.variables:
        raise SchemaError("stored variable names do not match the assembled system")
    e.variables = list(ps.variables)
    vec = e.solution_vector(args.index)
    x = ps.to_assignment(vec)
    rep = fock.check_virasoro(ps, x, _pairs(args.pairs), args.grade, args.momentum_bound)
    out = {"schema": "qrs/1", "key": e.key, "index": args.index, "report": rep.to_dict()}
    _emit(out, args.out)
    return EXIT_OK if rep.passed(args.tol) else EXIT_INVALID


def _charge_str(v) -> str:
    if isinstance(v, (Fraction, int)):
        return str(v)
    if isinstance(v, Surd):
        return str(v.rational_part()) if v.is_rational() else str(v)
    if isinstance(v, complex):
        return f"{v.real:.10g}{v.imag:+.10g}i"
    return f"{float(v):.10g}"


def report_rows(cat: CatalogFile) -> list[dict]:
    rows = []
    for e in cat.entries:
        charges = set()
        for s in e.solutions:
            if s.get("status", "accepted") != "accepted":
                continue
            charges.add(_charge_str(number_from_json(s["central_charge"])))
        rows.append({
            "system": e.system.name or e.key,
            "dim": e.system.dim,
            "roots": 2 * e.system.size,
            "long": 2 * e.system.n_long,
            "short": 2 * e.system.n_short,
            "solutions": len(e.solutions),
            "central_charges": sorted(charges, key=_charge_sort),
        })
    return rows


def _charge_sort(s: str):
    try:
        return (0, float(Fraction(s)), s)
    except ValueError:
        return (1, 0.0, s)


def cmd_report(args) -> int:
    cat = read_catalog(args.catalog)
    rows = report_rows(cat)
    if args.json:
        sys.stdout.write(dumps({"schema": "qrs/1", "rows": rows}))
        return EXIT_OK
    head = f"{'#':>3}  {'system':<24} {'d':>2} {'roots':>12}  {'sols':>4}  central charges"
    print(head)
    print("-" * len(head))
    for i, r in enumerate(rows, 1):
        roots = f"{r['roots']} ({r['long']}L,{r['short']}S)"
        name = r["system"] if len(r["system"]) <= 24 else r["system"][:21] + "..."
        print(f"{i:>3}  {name:<24} {r['dim']:>2} {roots:>12}  {r['solutions']:>4}  "
              + ", ".join(r["central_charges"]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quasiroots", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("enumerate", help="enumerate simple quasi root systems")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET_NODES)
    q.add_argument("--max-roots", type=int, default=DEFAULT_MAX_ROOTS)
    q.add_argument("--out")
    q.set_defaults(func=cmd_enumerate)

    def add_input(q, positional="input"):
        q.add_argument(positional, nargs="?")
        q.add_argument("--name", help="named system, e.g. A1, B2, T2, QR7, I-type")
        q.add_argument("--matrix", help="Gram matrix for I-type, rows ';'-separated")
        q.add_argument("--factors", nargs=2, help="factors for Product")

    q = sub.add_parser("check", help="validate systems against the axioms")
    add_input(q)
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("solve", help="solve the ansatz equations")
    add_input(q)
    q.add_argument("--method", choices=["auto", "newton", "itype", "an"], default="auto")
    q.add_argument("--gauge", help="comma-separated positive roots that must be eigenvectors of A")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--starts", type=int, default=None)
    q.add_argument("--entry")
    q.add_argument("--out")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("verify", help="check a solution with the Fock-space oracle")
    q.add_argument("--system")
    q.add_argument("--name")
    q.add_argument("--matrix")
    q.add_argument("--factors", nargs=2)
    q.add_argument("--solution")
    q.add_argument("--entry")
    q.add_argument("--index", type=int, default=0)
    q.add_argument("--grade", type=int, default=4)
    q.add_argument("--pairs", default="1,-1;2,-2;2,-1")
    q.add_argument("--momentum-bound", type=int, default=16)
    q.add_argument("--tol", type=float, default=1e-9)
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("report", help="tabulate a catalog")
    q.add_argument("catalog")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except QuasiRootError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
