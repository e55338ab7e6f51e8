"""Named formulas for choice sets and the axiom of choice variants.

Each entry carries the formula built from constructors and a verbatim
rendering in the text syntax, kept with its original parenthesization so
that symbol counts can be taken from it.  ``≠`` and ``∉`` are sugar for
negated atoms.  Names are stable CLI identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .formula import (
    And,
    Equal,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    conj,
    free_vars,
    neq,
    notin,
)
from .syntax import token_count as _raw_token_count

FAULTS = ("flip-quantifier", "drop-conjunct", "wrong-patch")


class UnknownNameError(KeyError):
    def __init__(self, kind: str, name: str, valid: Iterable[str]):
        super().__init__(f"unknown {kind} {name!r}; valid names: {', '.join(valid)}")
        self.name = name

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    formula: Formula
    official_rendering: str
    declared_free_vars: tuple[str, ...]
    description: str
    note: str = field(default="")


def M(u, v):
    return Member(u, v)


def E(u, v):
    return Equal(u, v)


# building blocks, each a function of its free variables' names

def ach1(x="x"):
    return Forall("z", Implies(M("z", x), Exists("b", M("b", "z"))))


def ach2(x="x"):
    return Forall("z", Implies(M("z", x), Forall("z'", Implies(
        M("z'", x), Implies(neq("z", "z'"), Forall("a", Implies(M("a", "z"), notin("a", "z'"))))))))


def ach_star(x="x"):
    return Forall("z", Implies(M("z", x), Exists("a", And(M("a", "z"), Forall("z'", Implies(
        M("z'", x), Implies(neq("z", "z'"), notin("a", "z'"))))))))


def unique_choice_body():
    """a ∈ z ∧ a ∈ y ∧ ∀b (b ∈ z ∧ b ∈ y → b = a)"""
    return conj(M("a", "z"), M("a", "y"),
                Forall("b", Implies(And(M("b", "z"), M("b", "y")), E("b", "a"))))


def schema_a():
    return Implies(Exists("b", M("b", "z")), Exists("a", unique_choice_body()))


def schema_b_matrix():
    return And(
        Implies(M("b", "z"), And(M("a", "z"), M("a", "y"))),
        Implies(And(M("a", "z"), M("a", "y")), Implies(And(M("b", "z"), M("b", "y")), E("b", "a"))),
    )


def schema_b():
    return Exists("a", Forall("b", schema_b_matrix()))


def choice(x="x"):
    return Forall("z", Implies(M("z", x), schema_a()))


def choice_unique():
    nonempty = Not(Forall("b", Not(M("b", "z"))))
    unique = Exists("a", conj(M("a", "y"), M("a", "z"),
                              Forall("b", Implies(M("b", "y"), Implies(M("b", "z"), E("b", "a"))))))
    return Forall("z", Implies(M("z", "x"), Implies(nonempty, unique)))


def choice3():
    return Forall("z", Implies(M("z", "x"), schema_b()))


def choice_bar():
    return Forall("z", Implies(M("z", "x"), Exists("a", unique_choice_body())))


def a_matrix():
    return Implies(M("z", "y"), conj(M("a", "x"), neq("a", "y"), M("z", "a")))


def b_matrix(drop_conjunct=False):
    body = schema_b_matrix()
    if drop_conjunct:
        body = body.left
    return Implies(M("z", "x"), body)


def b_bar_matrix():
    return Implies(M("z", "x"), conj(M("a", "z"), M("a", "y"),
                                     Implies(And(M("b", "z"), M("b", "y")), E("b", "a"))))


def ac():
    return Forall("x", Implies(And(ach1(), ach2()), Exists("y", choice())))


def ac_star(choice_form=choice):
    return Forall("x", Implies(ach_star(), Exists("y", And(notin("y", "x"), choice_form()))))


def ac_double_star(b_form, flip=False):
    matrix = Or(And(M("y", "x"), a_matrix()), And(notin("y", "x"), b_form))
    inner = Exists("b", matrix) if flip else Forall("b", matrix)
    return Forall("x", Exists("y", Forall("z", Exists("a", inner))))


def phi():
    others_miss = Forall("z*", Implies(M("z*", "x"), Implies(neq("z", "z*"), notin("a", "z*"))))
    return And(
        Forall("a", Implies(M("a", "z"), Implies(others_miss, M("a", "z_x")))),
        Forall("a", Implies(M("a", "z_x"), And(M("a", "z"), others_miss))),
    )


def _witness_part():
    """z' ∈ x ∧ z ≠ z' ∧ a ∈ z'"""
    return conj(M("z'", "x"), neq("z", "z'"), M("a", "z'"))


# verbatim renderings

_C = "∀z ∈ x ((∃b b ∈ z) → ∃a (a ∈ z ∧ a ∈ y ∧ ∀b (b ∈ z ∧ b ∈ y → b = a)))"
_C_UNIQUE = "∀z ∈ x ((¬∀b ¬b ∈ z) → ∃a ∈ y (a ∈ z ∧ ∀b ∈ y (b ∈ z → b = a)))"
_SCHEMA_A = "(∃b b ∈ z) → ∃a (a ∈ z ∧ a ∈ y ∧ ∀b (b ∈ z ∧ b ∈ y → b = a))"
_SCHEMA_B_MATRIX = "(b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))"
_SCHEMA_B = f"∃a ∀b [{_SCHEMA_B_MATRIX}]"
_C3 = f"∀z (z ∈ x → {_SCHEMA_B})"
_ACH1 = "∀z ∈ x ∃b b ∈ z"
_ACH2 = "∀z ∈ x ∀z' ∈ x (z ≠ z' → ∀a ∈ z a ∉ z')"
_ACH_STAR = "∀z ∈ x ∃a ∈ z ∀z' ∈ x (z ≠ z' → a ∉ z')"
_AC = f"∀x [({_ACH1}) ∧ ({_ACH2}) → ∃y {_C}]"
_AC_STAR = f"∀x (({_ACH_STAR}) → ∃y (y ∉ x ∧ {_C}))"
_C_BAR = "∀z ∈ x ∃a (a ∈ z ∧ a ∈ y ∧ ∀b (b ∈ z ∧ b ∈ y → b = a))"
_AC_STAR_BAR = f"∀x (({_ACH_STAR}) → ∃y (y ∉ x ∧ {_C_BAR}))"
_A = "z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a"
_B = f"z ∈ x → {_SCHEMA_B_MATRIX}"
_B_BAR = "z ∈ x → a ∈ z ∧ a ∈ y ∧ (b ∈ z ∧ b ∈ y → b = a)"
_AC2 = f"∀x ∃y ∀z ∃a ∀b [(y ∈ x ∧ ({_A})) ∨ (y ∉ x ∧ ({_B}))]"
_AC2_BAR = f"∀x ∃y ∀z ∃a ∀b [(y ∈ x ∧ ({_A})) ∨ (y ∉ x ∧ ({_B_BAR}))]"
_PHI = ("(∀a ∈ z ((∀z* ∈ x (z ≠ z* → a ∉ z*)) → a ∈ z_x)) "
        "∧ ∀a ∈ z_x (a ∈ z ∧ ∀z* ∈ x (z ≠ z* → a ∉ z*))")

_NEG_HYP = [
    "¬∀z [z ∈ x → ∃a (a ∈ z ∧ ∀z' [z' ∈ x → (z ≠ z' → a ∉ z')])]",
    "∃z [z ∈ x ∧ ∀a (a ∈ z → ∃z' [z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
    "∃z [z ∈ x ∧ ∀a ∃z' (a ∈ z → [z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
    "∃z ∀a ∃z' [z ∈ x ∧ (a ∈ z → [z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
    f"∃y ∀z ∃a (y ∈ x ∧ ({_A}))",
    f"∃y ∀z ∃a ∀b (y ∈ x ∧ ({_A}))",
]
_BRACKET_NOTE = "source display has an unbalanced closing ']'; stored with the balanced reading"
_CONCL = [
    f"∃y (y ∉ x ∧ {_C})",
    f"∃y (y ∉ x ∧ ∀z (z ∈ x → {_SCHEMA_B}))",
    f"∃y (y ∉ x ∧ ∀z ∃a ∀b ({_B}))",
    f"∃y ∀z ∃a ∀b (y ∉ x ∧ ({_B}))",
]
_AC_STAR_DISJ = f"∀x (¬({_ACH_STAR}) ∨ ∃y (y ∉ x ∧ {_C}))"
_AC_STAR_SPLIT = f"∀x [({_NEG_HYP[5]}) ∨ {_CONCL[3]}]"


def _neg_hyp_formulas():
    wit = _witness_part()
    a_part = And(M("y", "x"), a_matrix())
    return [
        Not(ach_star()),
        Exists("z", And(M("z", "x"), Forall("a", Implies(M("a", "z"), Exists("z'", wit))))),
        Exists("z", And(M("z", "x"), Forall("a", Exists("z'", Implies(M("a", "z"), wit))))),
        Exists("z", Forall("a", Exists("z'", And(M("z", "x"), Implies(M("a", "z"), wit))))),
        Exists("y", Forall("z", Exists("a", a_part))),
        Exists("y", Forall("z", Exists("a", Forall("b", a_part)))),
    ]


def _conclusion_formulas(drop_conjunct=False):
    b = b_matrix(drop_conjunct)
    return [
        Exists("y", And(notin("y", "x"), choice())),
        Exists("y", And(notin("y", "x"), choice3())),
        Exists("y", And(notin("y", "x"), Forall("z", Exists("a", Forall("b", b))))),
        Exists("y", Forall("z", Exists("a", Forall("b", And(notin("y", "x"), b))))),
    ]


CHAINS = {
    "negated-hypothesis": [f"neg-hyp-{i}" for i in range(1, 7)],
    "choice-conclusion": [f"conclusion-{i}" for i in range(1, 5)],
    "main": ["AC*", "AC*-disjunctive", "AC*-split", "AC**"],
}


@lru_cache(maxsize=None)
def build_catalog(faults: frozenset = frozenset()) -> dict[str, CatalogEntry]:
    """All entries by name.  `faults` names deliberate corruptions (see FAULTS)."""
    unknown = set(faults) - set(FAULTS)
    if unknown:
        raise UnknownNameError("fault", sorted(unknown)[0], FAULTS)
    drop = "drop-conjunct" in faults
    flip = "flip-quantifier" in faults
    b = b_matrix(drop)
    out: dict[str, CatalogEntry] = {}

    def add(name, formula, rendering, fv, description, note=""):
        out[name] = CatalogEntry(name, formula, rendering, tuple(fv.split()), description, note)

    add("C", choice(), _C, "x y", "y is a choice set for x")
    add("C-unique", choice_unique(), _C_UNIQUE, "x y",
        "choice set with unique-existence and non-emptiness unfolded directly")
    add("schema-A", schema_a(), _SCHEMA_A, "y z", "nonempty z meets y in exactly one point")
    add("schema-B", schema_b(), _SCHEMA_B, "y z", "two-quantifier form of schema-A")
    add("C3", choice3(), _C3, "x y", "three-quantifier choice-set formula")
    add("AC_h1", ach1(), _ACH1, "x", "no element of x is empty")
    add("AC_h2", ach2(), _ACH2, "x", "elements of x are pairwise disjoint")
    add("AC", ac(), _AC, "", "axiom of choice, disjoint-family form")
    add("AC_h*", ach_star(), _ACH_STAR, "x",
        "every element of x has a member lying in no other element of x")
    add("AC*", ac_star(), _AC_STAR, "", "strengthened choice: choice set not in x")
    add("A", a_matrix(), _A, "a x y z", "left disjunct matrix of AC**")
    add("B", b, _B, "a b x y z", "right disjunct matrix of AC**")
    add("AC**", ac_double_star(b, flip), _AC2, "", "five-quantifier choice sentence")
    add("C-bar", choice_bar(), _C_BAR, "x y", "choice set ignoring the non-emptiness guard")
    add("B-bar", b_bar_matrix(), _B_BAR, "a b x y z", "shortened right disjunct matrix")
    add("AC*-bar", ac_star(choice_bar), _AC_STAR_BAR, "", "AC* using C-bar")
    add("AC**-bar", ac_double_star(b_bar_matrix()), _AC2_BAR, "", "AC** using B-bar")
    add("phi", phi(), _PHI, "x z z_x",
        "z_x is the set of members of z lying in no other element of x (bounded form)")

    for i, (f, r) in enumerate(zip(_neg_hyp_formulas(), _NEG_HYP), start=1):
        add(f"neg-hyp-{i}", f, r, "x", f"negated AC_h* rewrite, stage {i}",
            _BRACKET_NOTE if i in (3, 4) else "")
    for i, (f, r) in enumerate(zip(_conclusion_formulas(drop), _CONCL), start=1):
        add(f"conclusion-{i}", f, r, "x", f"choice conclusion rewrite, stage {i}")
    add("AC*-disjunctive", Forall("x", Or(Not(ach_star()), _conclusion_formulas()[0])),
        _AC_STAR_DISJ, "", "AC* with the implication read as a disjunction")
    add("AC*-split", Forall("x", Or(_neg_hyp_formulas()[5], _conclusion_formulas(drop)[3])),
        _AC_STAR_SPLIT, "", "both disjuncts of AC* in prenex form")

    add("ACh-implies-ACh*", Forall("x", Implies(And(ach1(), ach2()), ach_star())),
        f"∀x (({_ACH1}) ∧ ({_ACH2}) → ({_ACH_STAR}))", "",
        "non-empty pairwise disjoint families satisfy AC_h*")
    add("AC*-implies-AC", Implies(ac_star(), ac()), f"({_AC_STAR}) → ({_AC})", "",
        "AC* implies AC without set axioms")
    add("guards-exclusive",
        Not(And(And(M("y", "x"), a_matrix()), And(notin("y", "x"), b))),
        f"¬[(y ∈ x ∧ ({_A})) ∧ (y ∉ x ∧ ({_B}))]", "a b x y z",
        "the two disjuncts of AC** never hold together")
    add("schema-equivalence",
        Implies(Forall("t", Implies(And(M("t", "z"), M("t", "y")), M("t", "z"))),
                Iff(schema_a(), schema_b())),
        f"(∀t (t ∈ z ∧ t ∈ y → t ∈ z)) → (({_SCHEMA_A}) ↔ {_SCHEMA_B})", "y z",
        "premise → (A ↔ B) for the choice-set slot instance")
    return out


def catalog() -> dict[str, CatalogEntry]:
    return build_catalog(frozenset())


def names() -> list[str]:
    return list(catalog())


def get(name: str, faults: frozenset = frozenset()) -> CatalogEntry:
    entries = build_catalog(frozenset(faults))
    try:
        return entries[name]
    except KeyError:
        raise UnknownNameError("catalog entry", name, entries) from None


def list_chain(chain: str, faults: frozenset = frozenset()) -> list[CatalogEntry]:
    try:
        members = CHAINS[chain]
    except KeyError:
        raise UnknownNameError("chain", chain, CHAINS) from None
    return [get(n, faults) for n in members]


def token_count(name_or_rendering: str) -> int:
    """Symbol count of an official rendering, given by entry name or verbatim text."""
    entries = catalog()
    if name_or_rendering in entries:
        return _raw_token_count(entries[name_or_rendering].official_rendering)
    for e in entries.values():
        if e.official_rendering == name_or_rendering:
            return _raw_token_count(name_or_rendering)
    raise UnknownNameError("official rendering", name_or_rendering, entries)


def check_entry(e: CatalogEntry) -> list[str]:
    """Problems with an entry's internal consistency (empty when sound)."""
    from .syntax import parse

    problems = []
    if parse(e.official_rendering) != e.formula:
        problems.append("official rendering does not parse to the formula")
    if free_vars(e.formula) != set(e.declared_free_vars):
        problems.append(f"free variables {sorted(free_vars(e.formula))} != declared {list(e.declared_free_vars)}")
    return problems
