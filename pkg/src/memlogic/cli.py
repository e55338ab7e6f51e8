"""Command-line interface.

Exit codes: 0 success or valid, 1 counterexample or failed check,
2 usage, parse, or cap errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import catalog, hf
from .formula import FormulaError, prefix_pattern, quantifier_count
from .model import EvaluationError, SizeCapError, check_equiv, check_valid
from .suite import verify_paper
from .syntax import ParseError, parse, print_formula, token_count
from .transforms import prenex, verify_trace


class UsageError(Exception):
    pass


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def resolve(arg: str, literal: bool = False):
    """Catalog name, then an existing file, then formula text."""
    if not literal:
        if arg in catalog.catalog():
            return catalog.get(arg).formula
        if arg == "-" or os.path.isfile(arg):
            return parse(_read_text(arg))
    return parse(arg)


def _verdict_out(verdict) -> int:
    if verdict.ok:
        print(f"ValidUpTo({verdict.nmax})")
        return 0
    print(json.dumps(verdict.to_json(), ensure_ascii=False))
    return 1


def cmd_parse(args) -> int:
    print(print_formula(resolve(args.formula, args.literal)))
    return 0


def cmd_print(args) -> int:
    print(print_formula(resolve(args.formula, args.literal), unicode=True))
    return 0


def cmd_count(args) -> int:
    if args.tokens:
        if args.formula in catalog.catalog():
            print(catalog.token_count(args.formula))
        elif os.path.isfile(args.formula) or args.formula == "-":
            print(token_count(_read_text(args.formula).strip()))
        else:
            print(token_count(args.formula))
        return 0
    print(quantifier_count(resolve(args.formula, args.literal)))
    return 0


def cmd_prenex(args) -> int:
    f = resolve(args.formula, args.literal)
    g, trace = prenex(f)
    print(print_formula(g))
    print(f"prefix: {prefix_pattern(g) or '(none)'}")
    if args.trace:
        print(json.dumps(trace.to_json(), indent=2, ensure_ascii=False))
    if args.verify is None:
        return 0
    verdict = verify_trace(trace, args.verify, args.jobs)
    if verdict.ok:
        print(f"trace: {len(trace.steps)} steps, each ValidUpTo({verdict.nmax})")
        return 0
    print(json.dumps(verdict.to_json(), ensure_ascii=False))
    return 1


def cmd_check_valid(args) -> int:
    f = resolve(args.formula, args.literal)
    return _verdict_out(check_valid(f, args.nmax, closure=args.close, jobs=args.jobs))


def cmd_check_equiv(args) -> int:
    f = resolve(args.left, args.literal)
    g = resolve(args.right, args.literal)
    return _verdict_out(check_equiv(f, g, args.nmax, jobs=args.jobs))


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name, e in catalog.catalog().items():
            print(f"{name}\t{e.description}")
        return 0
    if args.name is None:
        raise UsageError("catalog show needs a NAME")
    e = catalog.get(args.name)
    print(f"name: {e.name}")
    print(f"rendering: {e.official_rendering}")
    print(f"formula: {print_formula(e.formula)}")
    print(f"free: {' '.join(e.declared_free_vars) or '(none)'}")
    print(f"quantifiers: {quantifier_count(e.formula)}")
    print(f"description: {e.description}")
    if e.note:
        print(f"note: {e.note}")
    return 0


def _hf_arg(text: str, k: int) -> int:
    try:
        x = hf.parse_hf(text)
    except ValueError as err:
        raise UsageError(str(err)) from None
    if x >= hf.stage_size(k + 1):
        raise UsageError(f"{text} is not a subset of V_{k}; raise --rank")
    return x


def cmd_hf(args) -> int:
    k = args.rank
    if k > hf.max_rank():
        raise hf.RankCapError(f"rank {k} exceeds cap {hf.max_rank()} (set QC_MAX_RANK to raise it)")
    want = {"phi": 2, "star": 1, "choose": 1, "check": 1}[args.action]
    if len(args.sets) != want:
        raise UsageError(f"hf {args.action} takes {want} set argument(s)")
    xs = [_hf_arg(t, k) for t in args.sets]
    if args.action == "phi":
        z, x = xs
        if not hf.contains(x, z):
            raise UsageError("z must be an element of x")
        print(hf.to_text(hf.phi(z, x)))
        return 0
    if args.action == "star":
        print(hf.to_text(hf.star(xs[0])))
        return 0
    if args.action == "choose":
        try:
            trace = hf.construct_choice_set(xs[0])
        except hf.PreconditionError as err:
            print(str(err), file=sys.stderr)
            return 1
        print(json.dumps(trace.to_json(), ensure_ascii=False))
        return 0
    bad = hf.check_one(xs[0])
    print(json.dumps({"x": hf.to_text(xs[0]), "failures": bad}, ensure_ascii=False))
    return 1 if bad else 0


def cmd_verify_paper(args) -> int:
    result = verify_paper(
        nmax=args.nmax,
        rank=args.rank,
        seed=args.seed,
        count=args.count,
        faults=args.inject_fault or (),
        jobs=args.jobs,
        budget=args.budget,
    )
    # keep stdout pure JSON when the report goes there
    log = sys.stderr if args.json == "-" else sys.stdout
    for c in result.checks:
        print(f"{c.status.upper():4}  {c.check}  ({c.millis} ms)", file=log)
    if not result.complete:
        print("INCOMPLETE: budget exhausted before every check ran", file=log)
    if args.json:
        text = result.dumps()
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="memlogic", description="(∈,=)-formulas, finite models, and HF sets")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("formula", help="catalog name, file, '-' for stdin, or formula text")
        sp.add_argument("--literal", action="store_true", help="read the argument as formula text")
        sp.set_defaults(fn=fn)
        return sp

    formula_cmd("parse", cmd_parse, "print the canonical ASCII form")
    formula_cmd("print", cmd_print, "print the Unicode form")

    sp = formula_cmd("count", cmd_count, "count quantifiers or symbols")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--quantifiers", action="store_true")
    mode.add_argument("--tokens", action="store_true")

    sp = formula_cmd("prenex", cmd_prenex, "prenex form with a rewrite trace")
    sp.add_argument("--verify", type=int, metavar="NMAX", help="check every trace step up to NMAX")
    sp.add_argument("--trace", action="store_true", help="print the trace as JSON")
    sp.add_argument("--jobs", type=int, default=1)

    sp = formula_cmd("check-valid", cmd_check_valid, "search for a finite counterexample")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--close", action="store_true", help="read free variables universally")
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("check-equiv", help="check f ↔ g on all small structures")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--literal", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_check_equiv)

    sp = sub.add_parser("catalog", help="list or show named formulas")
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("name", nargs="?")
    sp.set_defaults(fn=cmd_catalog)

    sp = sub.add_parser("hf", help="hereditarily finite set operations")
    sp.add_argument("action", choices=("phi", "star", "choose", "check"))
    sp.add_argument("sets", nargs="+", help="sets as nested braces or integer codes")
    sp.add_argument("--rank", type=int, default=4, help="arguments must be subsets of V_rank")
    sp.set_defaults(fn=cmd_hf)

    sp = sub.add_parser("verify-paper", help="run the full verification suite")
    sp.add_argument("--nmax", type=int, default=3)
    sp.add_argument("--rank", type=int, default=4)
    sp.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=10_000, help="random formulas for the round-trip check")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--budget", type=float, metavar="SECONDS")
    sp.add_argument("--inject-fault", action="append", choices=catalog.FAULTS)
    sp.set_defaults(fn=cmd_verify_paper)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return args.fn(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
    except (UsageError, FormulaError, EvaluationError, SizeCapError, hf.RankCapError,
            catalog.UnknownNameError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
    return 2


__all__ = ["main", "build_parser", "resolve"]
