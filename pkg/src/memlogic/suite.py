"""The verify-paper suite: every checkable claim, one report each."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import catalog, hf
from .formula import Iff, Formula, prefix_pattern, quantifier_count
from .model import Counterexample, FinStructure, check_equiv, check_valid, evaluate, truth_table
from .randgen import random_formulas
from .syntax import parse, print_formula
from .transforms import derive_ac_double_star, first_failure, hoist

REPORT_SCHEMA = {
    "type": "object",
    "required": ["complete", "status", "params", "checks"],
    "properties": {
        "complete": {"type": "boolean"},
        "status": {"enum": ["pass", "fail"]},
        "params": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["check", "citation", "params", "status", "millis"],
                "additionalProperties": False,
                "properties": {
                    "check": {"type": "string"},
                    "citation": {"type": "string"},
                    "params": {"type": "object"},
                    "status": {"enum": ["pass", "fail"]},
                    "millis": {"type": "integer", "minimum": 0},
                    "witness": {
                        "type": "object",
                        "properties": {
                            "domain_size": {"type": "integer", "minimum": 1},
                            "membership": {
                                "type": "array",
                                "items": {"type": "array", "items": {"type": "integer"},
                                          "minItems": 2, "maxItems": 2},
                            },
                            "assignment": {"type": "object",
                                           "additionalProperties": {"type": "integer"}},
                            "formula": {"type": "string"},
                        },
                    },
                },
            },
        },
    },
}


@dataclass
class CheckReport:
    check: str
    citation: str
    params: dict
    status: str
    witness: Optional[dict] = None
    millis: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"check": self.check, "citation": self.citation, "params": self.params,
               "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        out["millis"] = self.millis
        return out


@dataclass
class SuiteResult:
    checks: list[CheckReport]
    complete: bool = True
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.complete and all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "status": "pass" if self.passed else "fail",
            "params": self.params,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def counterexample_witness(verdict: Counterexample, formula: Formula) -> dict:
    w = verdict.to_json()
    del w["verdict"]
    w["formula"] = print_formula(formula)
    return w


def recheck_witness(witness: dict) -> bool:
    """True iff a structural witness really falsifies its formula."""
    f = parse(witness["formula"])
    s = FinStructure.from_edges(witness["domain_size"], [tuple(e) for e in witness["membership"]])
    return not evaluate(s, witness["assignment"], f)


def recheck_report(report: CheckReport, params: dict) -> bool:
    """Independently confirm a failed report's witness.

    `params` are the suite parameters the report came from.  Structural
    witnesses are re-evaluated with the reference semantics, set witnesses
    go back through the per-set property check, and anything else is
    reproduced by rerunning that one check.
    """
    w = report.witness
    if not w:
        return False
    if "formula" in w and "domain_size" in w:
        return recheck_witness(w)
    if "failures" in w:
        faulty = "wrong-patch" in set(params.get("faults", ()))
        return all(p in hf.check_one(f["x"], faulty) for p, f in w["failures"].items())
    rerun = verify_paper(**params, only={report.check})
    return [c.witness for c in rerun.checks] == [w]


class _Suite:
    def __init__(self, nmax, rank, seed, count, faults, jobs, budget, only):
        self.only = only
        self.nmax, self.rank, self.seed, self.count = nmax, rank, seed, count
        self.faults = frozenset(faults)
        self.jobs = jobs
        self.deadline = None if budget is None else time.monotonic() + budget
        self.reports: list[CheckReport] = []

    def entry(self, name) -> Formula:
        return catalog.get(name, self.faults).formula

    def run(self, check: str, citation: str, params: dict, fn: Callable[[], Optional[dict]]) -> bool:
        if self.only is not None and check not in self.only:
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            return False
        start = time.perf_counter()
        witness = fn()
        millis = int((time.perf_counter() - start) * 1000)
        status = "pass" if witness is None else "fail"
        self.reports.append(CheckReport(check, citation, params, status, witness, millis))
        return True

    def valid(self, check, citation, formula: Formula, n: int) -> bool:
        def fn():
            verdict = check_valid(formula, n, closure=True, jobs=self.jobs)
            return None if verdict.ok else counterexample_witness(verdict, formula)
        return self.run(check, citation, {"nmax": n}, fn)

    def equiv(self, check, citation, left: str, right: str, n: int) -> bool:
        f = Iff(self.entry(left), self.entry(right))
        return self.valid(check, citation, f, n)


def verify_paper(
    nmax: int = 3,
    rank: int = 4,
    seed: int = 0,
    count: int = 10_000,
    faults=(),
    jobs: int = 1,
    budget: Optional[float] = None,
    only=None,
) -> SuiteResult:
    """Run every check in a fixed order.

    `nmax` bounds structure size for the five-quantifier sentences; the
    smaller sentences are checked one size further.  `rank` selects the
    hereditarily finite sweep over all subsets of V_rank.  `only` restricts
    the run to the named checks.
    """
    if nmax < 2 or rank < 3:
        raise ValueError("verify_paper needs nmax >= 2 and rank >= 3")
    s = _Suite(nmax, rank, seed, count, faults, jobs, budget, only)
    small = nmax + 1
    steps = [
        lambda: s.run("quantifier-counts", "AC** and AC**-bar use five quantifiers; C3 uses three, "
                      "with prefix ∀∃∀; B and B-bar are quantifier-free",
                      {}, lambda: _counts(s)),
        lambda: s.valid("schema-equivalence", "for the choice-set slots, premise → (A ↔ B)",
                        s.entry("schema-equivalence"), small),
        lambda: s.equiv("C-equiv-C-unique", "both renderings of the choice-set condition agree",
                        "C", "C-unique", small),
        lambda: s.equiv("C-equiv-C3", "the choice-set condition needs only three quantifiers",
                        "C", "C3", small),
        lambda: s.valid("disjoint-implies-private",
                        "non-empty pairwise disjoint families satisfy AC_h*",
                        s.entry("ACh-implies-ACh*"), small),
        lambda: s.valid("AC*-implies-AC", "AC* implies AC in pure predicate logic",
                        s.entry("AC*-implies-AC"), nmax),
        lambda: s.valid("guards-exclusive", "the two disjuncts of AC** exclude each other",
                        s.entry("guards-exclusive"), nmax),
        lambda: s.equiv("AC*-equiv-AC**", "AC* is equivalent to the five-quantifier AC**",
                        "AC*", "AC**", nmax),
        lambda: _chain(s, "negated-hypothesis"),
        lambda: _chain(s, "choice-conclusion"),
        lambda: _chain(s, "main"),
        lambda: s.run("derivation", "rewriting AC* step by step yields AC** exactly",
                      {"nmax": nmax}, lambda: _derivation(s)),
        lambda: s.equiv("AC*-equiv-AC*-bar", "dropping the non-emptiness guard from C keeps AC*",
                        "AC*", "AC*-bar", nmax),
        lambda: s.equiv("AC**-equiv-AC**-bar", "the shortened sentence is equivalent to AC**",
                        "AC**", "AC**-bar", nmax),
        lambda: s.run("token-delta", "AC**-bar is 16 symbols shorter than AC**", {},
                      lambda: _token_delta(s)),
        lambda: s.run("hf-sweep", "properties of z_x, x*, and the choice-set construction, "
                      f"for every subset x of V_{rank}", {"rank": rank}, lambda: _hf_sweep(s)),
        lambda: s.run("hf-nonempty-elements", "y is a choice set for x iff it is one for x without ∅",
                      {"rank": rank}, lambda: _nonempty_elements(s)),
        lambda: s.run("bridge", "choice sets and AC variants agree between sets and structures",
                      {"rank": min(rank, 4)}, lambda: _bridge(s)),
        lambda: s.run("round-trip", "parse ∘ print is the identity", {"seed": seed, "count": count},
                      lambda: _round_trip(s)),
        lambda: s.run("catalog-consistency", "official renderings parse to their formulas", {},
                      lambda: _catalog_consistency(s)),
    ]
    complete = True
    for step in steps:
        if not step():
            complete = False
            break
    params = {"nmax": nmax, "rank": rank, "seed": seed, "count": count,
              "faults": sorted(s.faults)}
    return SuiteResult(s.reports, complete, params)


def _counts(s: _Suite) -> Optional[dict]:
    observed = {
        "AC**": quantifier_count(s.entry("AC**")),
        "AC**-bar": quantifier_count(s.entry("AC**-bar")),
        "C3": quantifier_count(s.entry("C3")),
        "B": quantifier_count(s.entry("B")),
        "B-bar": quantifier_count(s.entry("B-bar")),
        "prefix(prenex(C3))": prefix_pattern(hoist(s.entry("C3"))[0]),
        "prefix(AC**)": _safe_prefix(s.entry("AC**")),
    }
    expected = {"AC**": 5, "AC**-bar": 5, "C3": 3, "B": 0, "B-bar": 0,
                "prefix(prenex(C3))": "∀∃∀", "prefix(AC**)": "∀∃∀∃∀"}
    return None if observed == expected else {"observed": observed, "expected": expected}


def _safe_prefix(f: Formula) -> str:
    try:
        return prefix_pattern(f)
    except ValueError as err:
        return str(err)


def _chain(s: _Suite, chain: str) -> bool:
    entries = catalog.list_chain(chain, s.faults)

    def fn():
        for a, b in zip(entries, entries[1:]):
            f = Iff(a.formula, b.formula)
            verdict = check_valid(f, s.nmax, closure=True, jobs=s.jobs)
            if not verdict.ok:
                w = counterexample_witness(verdict, f)
                w["pair"] = [a.name, b.name]
                return w
        return None

    return s.run(f"chain:{chain}", "each displayed rewrite stage is equivalent to the next",
                 {"nmax": s.nmax, "length": len(entries)}, fn)


def _derivation(s: _Suite) -> Optional[dict]:
    trace = derive_ac_double_star(s.entry("AC*"))
    target = s.entry("AC**")
    hit = first_failure(trace, s.nmax, s.jobs)
    if hit is not None:
        i, verdict = hit
        step = trace.steps[i]
        w = counterexample_witness(verdict, Iff(step.before, step.after))
        w["step"] = i
        w["rule"] = step.rule
        return w
    if trace.end != target:
        return {"derived": print_formula(trace.end), "expected": print_formula(target)}
    return None


def _token_delta(s: _Suite) -> Optional[dict]:
    long_, short = catalog.token_count("AC**"), catalog.token_count("AC**-bar")
    # the renderings are fixed text; make sure they still denote the formulas in use
    same = (parse(catalog.get("AC**").official_rendering) == s.entry("AC**")
            and parse(catalog.get("AC**-bar").official_rendering) == s.entry("AC**-bar"))
    if long_ - short == 16 and same:
        return None
    return {"AC**": long_, "AC**-bar": short, "delta": long_ - short, "renderings_match": same}


def _hf_sweep(s: _Suite) -> Optional[dict]:
    first = hf.sweep(s.rank, faulty_patch="wrong-patch" in s.faults)
    failures = {p: {"x": x, "x_text": hf.to_text(x)} for p, x in first.items() if x is not None}
    return {"failures": failures} if failures else None


def _nonempty_elements(s: _Suite) -> Optional[dict]:
    sets = hf.v_universe(s.rank)
    for x in sets:
        for y in sets:
            if hf.is_choice_set(y, x) != hf.is_choice_set(y, hf.empty_elements_removed(x)):
                return {"x": x, "y": y}
    return None


def _bridge(s: _Suite) -> Optional[dict]:
    k = min(s.rank, 4)
    structure, _ = hf.structure_of(k)
    mats = structure.matrix[None]
    c = s.entry("C")
    table = truth_table(c, mats, ["x", "y"])[0]
    for x in hf.v_universe(k):
        for y in hf.v_universe(k):
            if bool(table[x, y]) != hf.is_choice_set(y, x):
                return {"x": x, "y": y, "formula": bool(table[x, y])}
    for name in ("AC", "AC*", "AC**"):
        if not truth_table(s.entry(name), mats, [])[0]:
            return {"false_on_structure": name, "rank": k}
    return None


def _round_trip(s: _Suite) -> Optional[dict]:
    for i, f in enumerate(random_formulas(s.seed, s.count)):
        text = print_formula(f)
        if parse(text) != f:
            return {"index": i, "text": text}
    for e in catalog.catalog().values():
        for text in (print_formula(e.formula), print_formula(e.formula, unicode=True)):
            if parse(text) != e.formula:
                return {"entry": e.name, "text": text}
    return None


def _catalog_consistency(s: _Suite) -> Optional[dict]:
    problems = {}
    for name in catalog.names():
        e = catalog.get(name, s.faults)
        found = catalog.check_entry(e)
        if found:
            problems[name] = found
    return {"problems": problems} if problems else None


__all__ = ["CheckReport", "SuiteResult", "REPORT_SCHEMA", "verify_paper", "recheck_witness",
           "recheck_report"]
