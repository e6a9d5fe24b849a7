"""Command line interface: ``diffiso <subcommand> [options]``.

Every subcommand except ``table`` (without ``--json``) and ``canon``
(without ``--json``) writes a single JSON document.  Exit codes: 0 success,
1 verification failure or lemma violation, 2 usage or parse error,
3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .constructions import KINDS, ConstructionSpec, construct
from .core import RGraph, edge_space
from .errors import CapacityError, DiffisoError, FamilyFormatError, LemmaViolation
from .family import (
    complement_family,
    dualize,
    dumps_family,
    family_digest,
    find_involution_clique,
    is_difference_isomorphic,
    read_family,
)
from .isocanon import canon
from .lemmalab import DEFAULT_SAMPLES, LEMMA_IDS, run_check
from .relation import f_r
from .search import DEFAULT_BUDGET, duality_check, search

REPORT_FORMAT = "diffiso-report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _envelope(command: str, payload: dict) -> dict:
    return {"format_version": REPORT_FORMAT, "tool_version": __version__, "command": command, **payload}


def _emit(args, text: str) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, doc: dict) -> None:
    _emit(args, json.dumps(doc, indent=2 if args.pretty else None) + "\n")


def _set_threads(count: int | None) -> None:
    if count is None:
        return
    if count < 1:
        raise _Usage("--threads must be at least 1")
    import numba

    numba.set_num_threads(min(count, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_table(args) -> int:
    if args.r_max < 2 or args.n_max < args.r_max:
        raise _Usage("need 2 <= r-max <= n-max")
    rows = []
    for r in range(2, args.r_max + 1):
        for n in range(r, args.n_max + 1):
            f = f_r(n, r)
            rows.append({"n": n, "r": r, "f": f, "two_to_f": 2**f if f <= 64 else None})
    if args.json:
        _emit_json(args, _envelope("table", {"rows": rows}))
        return EXIT_OK
    lines = [f"{'n':>3} {'r':>3} {'f_r(n)':>8} {'2^f':>22}"]
    for row in rows:
        big = "-" if row["two_to_f"] is None else str(row["two_to_f"])
        lines.append(f"{row['n']:>3} {row['r']:>3} {row['f']:>8} {big:>22}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_construct(args) -> int:
    kind = args.kind.replace("-", "_")
    extra = {k: v for k, v in (("k", args.k), ("m", args.m)) if v is not None}
    fam = construct(ConstructionSpec(kind, args.n, args.r, extra))
    report = is_difference_isomorphic(fam)
    clique = None
    if fam.space.n <= 12:
        found = find_involution_clique(fam)
        clique = None if found is None else str(found)
    meta = {
        "construction": {"kind": kind, "n": args.n, "r": args.r, **extra},
        "verification": {
            "ok": report.ok,
            "checked_pairs": report.checked_pairs,
            "digest": family_digest(fam.space.n, fam.space.r, fam.hexes()),
        },
        "involution_clique": clique is not None,
        "involution": clique,
    }
    if not report.ok:
        meta["verification"]["witness"] = report.to_json()["witness"]
    _emit(args, dumps_family(fam, meta))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    fam = read_family(args.path)
    report = is_difference_isomorphic(fam)
    payload = {"n": fam.space.n, "r": fam.space.r, "size": len(fam), **report.to_json()}
    if args.clique:
        found = find_involution_clique(fam)
        payload["involution"] = None if found is None else str(found)
    _emit_json(args, _envelope("verify", payload))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_search(args) -> int:
    budget = DEFAULT_BUDGET if args.budget_secs is None else args.budget_secs
    if args.duality:
        rep = duality_check(args.n, args.r, budget)
        _emit_json(args, _envelope("search", {"duality": rep.to_json()}))
        return EXIT_OK if rep.match is not False else EXIT_FAIL
    res = search(args.n, args.r, budget, seed_extremal=args.seed_extremal)
    _emit_json(args, _envelope("search", res.to_json()))
    return EXIT_OK


def cmd_lemma(args) -> int:
    sweep = args.n_max is not None
    if sweep and args.n is not None or args.r_max is not None and args.r is not None:
        raise _Usage("give either --n/--r or --n-max/--r-max, not both")
    n = args.n_max if sweep else args.n
    r = args.r_max if args.r_max is not None else args.r
    if n is None:
        raise _Usage("lemma needs --n or --n-max")
    if sweep and r is None:
        r = n
    try:
        report = run_check(
            args.id, n, r,
            mode=args.mode,
            samples=args.samples,
            seed=args.seed,
            delta=args.delta,
            sweep=sweep,
        )
        code = EXIT_OK
    except LemmaViolation as exc:
        report = exc.report
        code = EXIT_FAIL
    _emit_json(args, _envelope("lemma", report.to_json()))
    return code


def cmd_canon(args) -> int:
    space = edge_space(args.n, args.r)
    g = RGraph.from_hex(space, args.graph)
    form = canon(g)
    if args.json:
        _emit_json(args, _envelope("canon", {"n": args.n, "r": args.r, "graph": g.hex(), "canon": form.hex()}))
    else:
        _emit(args, form.hex() + "\n")
    return EXIT_OK


def _transform(args, name, fn) -> int:
    fam = read_family(args.path)
    out = fn(fam)
    meta = {
        "operation": name,
        "source_digest": family_digest(fam.space.n, fam.space.r, fam.hexes()),
    }
    _emit(args, dumps_family(out, meta))
    return EXIT_OK


def cmd_dualize(args) -> int:
    return _transform(args, "dualize", dualize)


def cmd_complement(args) -> int:
    return _transform(args, "complement", complement_family)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _globals() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from clobbering a flag given before it
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    g.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help="indent JSON")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="PRNG seed (default 0)")
    g.add_argument("--budget-secs", type=float, default=argparse.SUPPRESS, help="search budget")
    return p


_GLOBAL_DEFAULTS = {"out": None, "pretty": False, "threads": None, "seed": 0, "budget_secs": None}


def build_parser() -> argparse.ArgumentParser:
    common = _globals()
    parser = argparse.ArgumentParser(
        prog="diffiso",
        description="Difference-isomorphic families of r-graphs.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"diffiso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="tabulate f_r(n)")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--r-max", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_table)

    kinds = sorted(set(KINDS) | {k.replace("_", "-") for k in KINDS})
    p = sub.add_parser("construct", parents=[common], help="write a constructed family")
    p.add_argument("kind", choices=kinds)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, help="number of stars")
    p.add_argument("--m", type=int, help="edge count for layer")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check a family file")
    p.add_argument("path")
    p.add_argument("--clique", action="store_true", help="also look for an involution clique")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="largest family by clique search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed-extremal", action="store_true")
    p.add_argument("--duality", action="store_true", help="also search (n, n-r) and compare")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("lemma", parents=[common], help="run a finite lemma check")
    p.add_argument("--id", required=True, choices=LEMMA_IDS)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--n-max", type=int, help="sweep every n' <= n-max (2.4 and eq2)")
    p.add_argument("--r-max", type=int)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--delta", type=float)
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("canon", parents=[common], help="canonical form of one graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--graph", required=True, help="hex bitmask")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_canon)

    for name, func, text in (
        ("dualize", cmd_dualize, "map every edge e to [n] minus e"),
        ("complement", cmd_complement, "complement every member"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("path")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        _set_threads(args.threads)
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except FamilyFormatError as exc:
        print(f"diffiso: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"diffiso: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DiffisoError, OSError) as exc:
        print(f"diffiso: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
