"""Equivalence-preserving rewrites with recorded traces.

Every step stores the whole formula before and after, the position it was
applied at, and the side condition that licensed it.  `verify_trace`
re-checks each step semantically with the finite model checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .formula import (
    ATOMS,
    QUANTIFIERS,
    And,
    Equal,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Not,
    Or,
    SchemaSlot,
    all_vars,
    build_choice_schema,
    children,
    dual,
    fresh_variable,
    free_vars,
    prenex_split,
    quantifier_count,
    rename,
    replace_at,
    same_modulo_and_assoc,
    subformula,
    universal_closure,
    walk,
    with_children,
)
from .model import Counterexample, ValidUpTo, Verdict, check_equiv, check_valid
from .syntax import parse, print_formula

RULES = (
    "push_negation",
    "hoist_left",
    "hoist_right",
    "rename",
    "add_vacuous",
    "drop_vacuous",
    "implication_to_disjunction",
    "swap_equality",
    "choice_schema",
    "merge_guarded_disjunction",
    "expand_iff",
)


class RuleError(FormulaError):
    pass


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    before: Formula
    after: Formula
    path: tuple[int, ...]
    justification: str

    def __post_init__(self):
        if self.rule not in RULES:
            raise RuleError(f"unknown rule {self.rule!r}")

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "path": list(self.path),
            "before": print_formula(self.before),
            "after": print_formula(self.after),
            "side_condition": self.justification,
        }


@dataclass(frozen=True)
class Trace:
    start: Formula
    steps: tuple[RewriteStep, ...] = ()

    def __post_init__(self):
        current = self.start
        for i, step in enumerate(self.steps):
            if step.before != current:
                raise TraceError(f"step {i} ({step.rule}) does not continue from the previous formula")
            current = step.after

    @property
    def end(self) -> Formula:
        return self.steps[-1].after if self.steps else self.start

    def formulas(self) -> list[Formula]:
        return [self.start] + [s.after for s in self.steps]

    def to_json(self) -> dict:
        return {
            "start": print_formula(self.start),
            "end": print_formula(self.end),
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trace":
        steps = tuple(
            RewriteStep(s["rule"], parse(s["before"]), parse(s["after"]), tuple(s["path"]), s["side_condition"])
            for s in data["steps"]
        )
        return cls(parse(data["start"]), steps)


class Rewriter:
    """Applies local rewrites at paths of a root formula, recording steps."""

    def __init__(self, root: Formula):
        self.start = root
        self.root = root
        self.steps: list[RewriteStep] = []

    def at(self, path) -> Formula:
        return subformula(self.root, path)

    def apply(self, rule: str, path: tuple[int, ...], new: Formula, why: str) -> None:
        before = self.root
        self.root = replace_at(before, path, new)
        self.steps.append(RewriteStep(rule, before, self.root, tuple(path), why))

    def trace(self) -> Trace:
        return Trace(self.start, tuple(self.steps))


def _show(f: Formula) -> str:
    return print_formula(f)


# pure rewrites

def push_negation(f: Formula) -> Formula:
    """Drive every negation down to atoms.

    ¬¬p ⇒ p, ¬∀v p ⇒ ∃v ¬p, ¬∃v p ⇒ ∀v ¬p, ¬(p → q) ⇒ p ∧ ¬q,
    ¬(p ∨ q) ⇒ ¬p ∧ ¬q, ¬(p ↔ q) ⇒ p ↔ ¬q, and ¬(p ∧ q) ⇒ p → ¬q, which
    keeps a guarded ∃v(v ∈ t ∧ …) guarded as ∀v(v ∈ t → …).
    """
    if isinstance(f, Not):
        return _negate(f.body)
    return with_children(f, tuple(push_negation(k) for k in children(f)))


def _negate(g: Formula) -> Formula:
    if isinstance(g, ATOMS):
        return Not(g)
    if isinstance(g, Not):
        return push_negation(g.body)
    if isinstance(g, And):
        return Implies(push_negation(g.left), _negate(g.right))
    if isinstance(g, Or):
        return And(_negate(g.left), _negate(g.right))
    if isinstance(g, Implies):
        return And(push_negation(g.left), _negate(g.right))
    if isinstance(g, Iff):
        return Iff(push_negation(g.left), _negate(g.right))
    return dual(g)(g.var, _negate(g.body))


def expand_iff(f: Formula) -> Formula:
    """p ↔ q ⇒ (p → q) ∧ (q → p), wherever a quantifier sits below the ↔."""
    kids = tuple(expand_iff(k) for k in children(f))
    f = with_children(f, kids) if kids else f
    if isinstance(f, Iff) and quantifier_count(f):
        return And(Implies(f.left, f.right), Implies(f.right, f.left))
    return f


def implication_to_disjunction(f: Formula) -> Formula:
    if not isinstance(f, Implies):
        raise RuleError("not an implication")
    return Or(Not(f.left), f.right)


def add_vacuous(f: Formula, v: str, kind: type = Forall) -> Formula:
    """Insert a quantifier on v directly above the quantifier-free matrix."""
    if kind not in QUANTIFIERS:
        raise RuleError("kind must be Forall or Exists")
    if v in free_vars(f):
        raise RuleError(f"{v} is free in the formula; quantifying it is not vacuous")
    prefix, matrix = prenex_split(f)
    if v in {q.var for q in prefix}:
        raise RuleError(f"{v} is already bound in the prefix")
    out: Formula = kind(v, matrix)
    for q in reversed(prefix):
        out = type(q)(q.var, out)
    return out


def drop_vacuous(f: Formula) -> Formula:
    if not isinstance(f, QUANTIFIERS) or f.var in free_vars(f.body):
        raise RuleError("not a vacuous quantifier")
    return f.body


def swap_equalities(f: Formula, pairs) -> Formula:
    """Rewrite u = v as v = u for each (u, v) in pairs."""
    pairs = set(pairs)
    if isinstance(f, Equal) and (f.lhs, f.rhs) in pairs:
        return Equal(f.rhs, f.lhs)
    return with_children(f, tuple(swap_equalities(k, pairs) for k in children(f)))


def merge_guarded_disjunction(f: Formula) -> tuple[Formula, str]:
    """Q⃗(G ∧ P) ∨ Q⃗(¬G ∧ R)  ⇒  Q⃗((G ∧ P) ∨ (¬G ∧ R)).

    Sound when both sides carry the same prefix and the guard G is an atom
    mentioning none of the prefix variables after the leading ∃ block: for
    a fixed choice of those witnesses G settles which disjunct can hold.
    """
    if not isinstance(f, Or):
        raise RuleError("not a disjunction")
    (p1, m1), (p2, m2) = prenex_split(f.left), prenex_split(f.right)
    sig = [(type(q), q.var) for q in p1]
    if sig != [(type(q), q.var) for q in p2]:
        raise RuleError("disjuncts have different quantifier prefixes")
    if not (isinstance(m1, And) and isinstance(m2, And)):
        raise RuleError("matrices are not guarded conjunctions")
    g1, g2 = m1.left, m2.left
    if g2 == Not(g1):
        guard = g1
    elif g1 == Not(g2):
        guard = g2
    else:
        raise RuleError("guards are not complementary")
    if not isinstance(guard, ATOMS):
        raise RuleError("guard is not an atom")
    lead = 0
    while lead < len(p1) and isinstance(p1[lead], Exists):
        lead += 1
    inner = {q.var for q in p1[lead:]}
    clash = free_vars(guard) & inner
    if clash:
        raise RuleError(f"guard mentions inner variable(s) {sorted(clash)}")
    out: Formula = Or(m1, m2)
    for q in reversed(p1):
        out = type(q)(q.var, out)
    why = (f"guard {_show(guard)} mentions none of {sorted(inner) or 'the inner prefix'}; "
           "the two guarded matrices exclude each other")
    return out, why


# positional drivers

def _hoist_at(rw: Rewriter, path: tuple[int, ...]) -> None:
    node = rw.at(path)
    for i in range(len(children(node))):
        _hoist_at(rw, path + (i,))
    if isinstance(node, (And, Or, Implies)):
        _pull(rw, path)


def _pull(rw: Rewriter, path: tuple[int, ...]) -> None:
    node = rw.at(path)
    if not isinstance(node, (And, Or, Implies)):
        return
    if isinstance(node.left, QUANTIFIERS):
        side, q, other = 0, node.left, node.right
    elif isinstance(node.right, QUANTIFIERS):
        side, q, other = 1, node.right, node.left
    else:
        return
    if q.var in free_vars(other):
        fresh = fresh_variable(q.var, all_vars(rw.root))
        renamed = rename(q, {q.var: fresh})
        rw.apply("rename", path + (side,), renamed,
                 f"{q.var} is free in {_show(other)}; bound variable renamed to {fresh}")
        q = renamed
    kind = type(q)
    if side == 0 and isinstance(node, Implies):
        kind = dual(q)
    body = type(node)(q.body, other) if side == 0 else type(node)(other, q.body)
    rule = "hoist_left" if side == 0 else "hoist_right"
    flip = " (antecedent: quantifier flipped)" if kind is not type(q) else ""
    rw.apply(rule, path, kind(q.var, body), f"{q.var} not free in {_show(other)}{flip}")
    _pull(rw, path + (0,))


def hoist(f: Formula) -> tuple[Formula, Trace]:
    """Move quantifiers outward across ∧, ∨ and →, innermost first.

    A quantifier leaves the antecedent of → with its kind flipped.  The
    left operand's quantifiers go out before the right operand's.  ¬ and ↔
    are not crossed, so the result is prenex only when none of them sits
    above a quantifier.
    """
    rw = Rewriter(f)
    _hoist_at(rw, ())
    return rw.root, rw.trace()


def prenex(f: Formula) -> tuple[Formula, Trace]:
    """Prenex form of any formula: expand ↔, push ¬ to atoms, then hoist."""
    rw = Rewriter(f)
    g = expand_iff(f)
    if g != rw.root:
        rw.apply("expand_iff", (), g, "p ↔ q is (p → q) ∧ (q → p)")
    g = push_negation(rw.root)
    if g != rw.root:
        rw.apply("push_negation", (), g, "De Morgan and quantifier duality")
    _hoist_at(rw, ())
    return rw.root, rw.trace()


def _find(f: Formula, pred: Callable[[Formula], bool]) -> tuple[int, ...]:
    for path, node in walk(f):
        if pred(node):
            return path
    raise RuleError("no matching subformula")


def choice_slots() -> tuple[SchemaSlot, SchemaSlot, SchemaSlot]:
    """X(t) ≡ t ∈ z,  Y(t) ≡ X(t) ∧ t ∈ y,  Z(r, t) ≡ Y(r) → r = t."""
    from .formula import Member

    X = SchemaSlot("X", ("t",), Member("t", "z"))
    Y = SchemaSlot("Y", ("t",), And(Member("t", "z"), Member("t", "y")))
    Z = SchemaSlot("Z", ("r", "t"), Implies(And(Member("r", "z"), Member("r", "y")), Equal("r", "t")))
    return X, Y, Z


def apply_choice_schema(rw: Rewriter, path, slots=None, nmax: int = 3) -> None:
    slots = slots or choice_slots()
    premise, a_form, b_form = build_choice_schema(*slots)
    if not same_modulo_and_assoc(rw.at(path), a_form):
        raise RuleError("subformula is not an instance of the schema's A form")
    verdict = check_valid(universal_closure(premise), nmax)
    if not verdict.ok:
        raise RuleError(f"schema premise {_show(premise)} fails: {verdict}")
    rw.apply("choice_schema", path, b_form,
             f"premise {_show(premise)} valid up to size {nmax}; a and b not free in the slots")


# the derivation of AC** from AC*

HYPOTHESIS_RENAMING = {"z": "y", "a": "z", "z'": "a"}


def negated_hypothesis_steps(rw: Rewriter, path=()) -> None:
    """¬AC_h*(x) down to ∃y∀z∃a∀b(y ∈ x ∧ A(x,y,z,a))."""
    rw.apply("push_negation", path, push_negation(rw.at(path)), "negation moved inward")
    _hoist_at(rw, path)
    rw.apply("rename", path, rename(rw.at(path), HYPOTHESIS_RENAMING),
             "simultaneous renaming z→y, a→z, z'→a of bound variables")
    rw.apply("swap_equality", path, swap_equalities(rw.at(path), {("y", "a")}), "symmetry of =")
    rw.apply("add_vacuous", path, add_vacuous(rw.at(path), "b", Forall), "b not free")


def choice_conclusion_steps(rw: Rewriter, path=()) -> None:
    """∃y(y ∉ x ∧ C(y,x)) down to ∃y∀z∃a∀b(y ∉ x ∧ B(x,y,z,a,b))."""
    _, a_form, _ = build_choice_schema(*choice_slots())
    rel = _find(rw.at(path), lambda g: same_modulo_and_assoc(g, a_form))
    apply_choice_schema(rw, tuple(path) + rel)
    _hoist_at(rw, path)


def derive_negated_hypothesis(f: Formula) -> Trace:
    rw = Rewriter(f)
    negated_hypothesis_steps(rw)
    return rw.trace()


def derive_choice_conclusion(f: Formula) -> Trace:
    rw = Rewriter(f)
    choice_conclusion_steps(rw)
    return rw.trace()


def derive_ac_double_star(ac_star: Formula) -> Trace:
    """AC* = ∀x(AC_h*(x) → ∃y(y ∉ x ∧ C(y,x))) rewritten to its prenex form."""
    if not (isinstance(ac_star, Forall) and isinstance(ac_star.body, Implies)):
        raise RuleError("expected ∀x(hypothesis → conclusion)")
    rw = Rewriter(ac_star)
    rw.apply("implication_to_disjunction", (0,), implication_to_disjunction(rw.at((0,))), "p → q ≡ ¬p ∨ q")
    negated_hypothesis_steps(rw, (0, 0))
    choice_conclusion_steps(rw, (0, 1))
    merged, why = merge_guarded_disjunction(rw.at((0,)))
    rw.apply("merge_guarded_disjunction", (0,), merged, why)
    return rw.trace()


def first_failure(t: Trace, nmax: int, jobs: int = 1) -> Optional[tuple[int, Counterexample]]:
    for i, step in enumerate(t.steps):
        verdict = check_equiv(step.before, step.after, nmax, jobs=jobs)
        if not verdict.ok:
            return i, verdict
    return None


def verify_trace(t: Trace, nmax: int, jobs: int = 1) -> Verdict:
    """ValidUpTo(nmax) iff every step's before ↔ after survives sizes 1..nmax."""
    hit = first_failure(t, nmax, jobs)
    return ValidUpTo(nmax) if hit is None else hit[1]
