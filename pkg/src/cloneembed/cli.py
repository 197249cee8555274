"""``cloneembed`` command line.

Exit codes: 0 success, 1 a suite reported FAIL, 2 the input order is not a
lattice (or not a partial order), 3 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import Bounds
from .construction import FAULT_KINDS, build_system
from .embedding import clone_fragment, derive_phi_witness, pair_witness
from .enumeration import enumerate_clone, unspoilt_closure
from .family import SizeLimit
from .lattice import LatticeError, NotALattice, NotAPartialOrder, all_ideals
from .report import FAMILIES, SUITES, dumps, make_family, resolve_lattice, run, write_atomic
from .terms import to_sexpr

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("cloneembed")


def _bounds(args) -> Bounds:
    d = Bounds()
    return Bounds(
        max_arity=args.max_arity or d.max_arity,
        depth=d.depth if args.depth is None else args.depth,
        budget=args.budget or d.budget,
        work=args.work,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    name, L = resolve_lattice(args.lattice)
    print(f"{name}: lattice with {L.size} elements, bottom {L.names[L.bottom]}, top {L.names[L.top]}")
    return EXIT_OK


def cmd_build(args) -> int:
    name, L = resolve_lattice(args.lattice)
    fam = make_family(args.family, L.size)
    sys_ = build_system(L, fam)
    out = Path(args.out)
    witnesses = []
    for x, ideal in enumerate(all_ideals(L)):
        for p in sorted(ideal.members):
            t = derive_phi_witness(sys_, ideal, p)
            witnesses.append({"ideal": L.names[x], "p": L.names[p], "term": to_sexpr(t)})
    for (p, q1, q2) in sorted(sys_.m):
        witnesses.append({"pair": [L.names[q1], L.names[q2]], "p": L.names[p], "term": to_sexpr(pair_witness(sys_, p, q1, q2))})
    write_atomic(out / "lattice.json", json.dumps(L.to_json(), indent=2) + "\n")
    write_atomic(out / "family.json", json.dumps(fam.to_json(), indent=2) + "\n")
    write_atomic(out / "generators.json", json.dumps(sys_.to_json()) + "\n")
    write_atomic(out / "witnesses.json", json.dumps(witnesses, indent=2) + "\n")
    print(f"{name}: {len(sys_.phi)} phi and {len(sys_.m)} m tables on {sys_.size} points written to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run(
        args.lattice,
        family=args.family,
        suites=args.suite,
        bounds=_bounds(args),
        explicit_arity=args.max_arity is not None,
        fault=args.fault_inject,
    )
    _emit(dumps(report), args.out)
    for tag in report["failed"]:
        print(f"FAIL {tag}", file=sys.stderr)
    for tag in report["inconclusive"]:
        print(f"INCONCLUSIVE {tag}", file=sys.stderr)
    if report["partial_coverage"]:
        print(f"partial coverage: {', '.join(report['partial_coverage'])}", file=sys.stderr)
    print(f"status {report['status']}", file=sys.stderr)
    return EXIT_FAIL if report["failed"] else EXIT_OK


def _dot_hasse(name: str, labels: list[str], covers) -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    for i, lab in enumerate(labels):
        lines.append(f'  n{i} [label="{lab}"];')
    for x, y in covers:
        lines.append(f"  n{x} -> n{y};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export(args) -> int:
    name, L = resolve_lattice(args.lattice)
    sys_ = build_system(L, make_family(args.family, L.size))
    if args.format == "json":
        _emit(json.dumps(sys_.to_json(), indent=1) + "\n", args.out)
        return EXIT_OK
    bounds = _bounds(args)
    sigs = []
    for ideal in all_ideals(L):
        sig = clone_fragment(sys_, ideal, bounds).signature()
        sigs.append("{" + ",".join(L.names[p] for p in sorted(sig)) + "}")
    covers = L.covers()
    text = _dot_hasse(f"{name}", list(L.names), covers)
    text += _dot_hasse(f"{name} image", [f"C_{L.names[x]}\\n{s}" for x, s in enumerate(sigs)], covers)
    _emit(text, args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    name, L = resolve_lattice(args.lattice)
    sys_ = build_system(L, make_family(args.family, L.size))
    bounds = _bounds(args)
    arity = args.arity
    if args.ideal:
        allowed = L.down(L.index(args.ideal))
        en = unspoilt_closure(sys_, allowed, arity, bounds.depth, bounds.budget, bounds.max_work)
    else:
        en = enumerate_clone(sys_, sys_.phi_symbols + sys_.m_symbols, arity, bounds.depth, bounds.budget,
                             max_work=bounds.max_work)
    lines = [
        json.dumps({"term": to_sexpr(t), "table_sha256": hashlib.sha256(op.key).hexdigest()[:16]})
        for t, op in en
    ]
    if args.jsonl:
        write_atomic(args.jsonl, "\n".join(lines) + "\n")
    print(json.dumps({"lattice": name, **en.summary()}))
    return EXIT_OK


def _add_bounds(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=None, help="term depth bound (default 3)")
    p.add_argument("--max-arity", type=int, default=None, help="largest arity enumerated (default 2; lemma suites 3)")
    p.add_argument("--budget", type=int, default=None, help="distinct operations per arity (default 200000)")
    p.add_argument("--work", type=int, default=None, help="candidate tuples per enumeration (default 20 * budget)")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cloneembed", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def lattice_cmd(name, help_, fn, family=True):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--lattice", required=True, help="fixture name or path to a lattice JSON file")
        if family:
            p.add_argument("--family", choices=FAMILIES, default="singleton")
        p.set_defaults(fn=fn)
        return p

    lattice_cmd("validate", "check that a file describes a finite lattice", cmd_validate, family=False)
    p = lattice_cmd("build", "write generator tables and witness terms", cmd_build)
    p.add_argument("--out", required=True)
    p = lattice_cmd("verify", "run verification suites and write a JSON report", cmd_verify)
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--out", default=None)
    p.add_argument("--fault-inject", choices=FAULT_KINDS, default=None, help=argparse.SUPPRESS)
    _add_bounds(p)
    p = lattice_cmd("export", "dump generator tables (json) or Hasse diagrams (dot)", cmd_export)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out", default=None)
    _add_bounds(p)
    p = lattice_cmd("enumerate", "enumerate a bounded slice of the clone", cmd_enumerate)
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--ideal", default=None, help="restrict to the unspoilt core of the principal ideal of this element")
    p.add_argument("--jsonl", default=None)
    _add_bounds(p)
    return ap


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.fn(args)
    except (NotALattice, NotAPartialOrder) as e:
        print(f"invalid: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, LatticeError, SizeLimit, KeyError, TypeError, ValueError) as e:
        print(f"input error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
