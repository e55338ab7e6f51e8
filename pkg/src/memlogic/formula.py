"""Immutable AST for first-order formulas over membership and equality."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

Variable = str

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_'*]*\Z")


class FormulaError(ValueError):
    pass


class NotPrenexError(FormulaError):
    def __init__(self, path: tuple[int, ...]):
        super().__init__(f"quantifier below the prefix at path {list(path)}")
        self.path = path


def check_variable(v: Variable) -> Variable:
    if not isinstance(v, str) or not _IDENT.match(v):
        raise FormulaError(f"invalid variable name {v!r}")
    return v


@dataclass(frozen=True)
class Member:
    lhs: Variable
    rhs: Variable

    def __post_init__(self):
        check_variable(self.lhs)
        check_variable(self.rhs)


@dataclass(frozen=True)
class Equal:
    lhs: Variable
    rhs: Variable

    def __post_init__(self):
        check_variable(self.lhs)
        check_variable(self.rhs)


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Variable
    body: "Formula"

    def __post_init__(self):
        check_variable(self.var)


@dataclass(frozen=True)
class Exists:
    var: Variable
    body: "Formula"

    def __post_init__(self):
        check_variable(self.var)


Atom = Union[Member, Equal]
Binary = Union[And, Or, Implies, Iff]
Quantifier = Union[Forall, Exists]
Formula = Union[Member, Equal, Not, And, Or, Implies, Iff, Forall, Exists]

ATOMS = (Member, Equal)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


# sugar used throughout the catalog

def neq(u: Variable, v: Variable) -> Not:
    return Not(Equal(u, v))


def notin(u: Variable, v: Variable) -> Not:
    return Not(Member(u, v))


def conj(*fs: Formula) -> Formula:
    """Right-nested conjunction, matching how `p & q & r` parses."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def forall(vs: str, body: Formula) -> Formula:
    for v in reversed(vs.split()):
        body = Forall(v, body)
    return body


def exists(vs: str, body: Formula) -> Formula:
    for v in reversed(vs.split()):
        body = Exists(v, body)
    return body


def dual(q: Quantifier) -> type:
    return Exists if isinstance(q, Forall) else Forall


# traversal

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, ATOMS):
        return ()
    if isinstance(f, (Not, Forall, Exists)):
        return (f.body,)
    return (f.left, f.right)


def with_children(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, kids[0])
    return type(f)(kids[0], kids[1])


def subformula(f: Formula, path: tuple[int, ...]) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(f, tuple(kids))


def walk(f: Formula, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Formula]]:
    """Pre-order (path, node) pairs."""
    yield path, f
    for i, k in enumerate(children(f)):
        yield from walk(k, path + (i,))


def free_vars(f: Formula) -> frozenset[Variable]:
    if isinstance(f, ATOMS):
        return frozenset((f.lhs, f.rhs))
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    out: frozenset[Variable] = frozenset()
    for k in children(f):
        out |= free_vars(k)
    return out


def all_vars(f: Formula) -> frozenset[Variable]:
    """Every variable name occurring in f, bound or free."""
    out = set()
    for _, node in walk(f):
        if isinstance(node, ATOMS):
            out.update((node.lhs, node.rhs))
        elif isinstance(node, QUANTIFIERS):
            out.add(node.var)
    return frozenset(out)


def quantifier_count(f: Formula) -> int:
    return sum(isinstance(node, QUANTIFIERS) for _, node in walk(f))


def atom_count(f: Formula) -> int:
    return sum(isinstance(node, ATOMS) for _, node in walk(f))


def fresh_variable(base: Variable, avoid) -> Variable:
    v = base
    while v in avoid:
        v += "'"
    return v


def rename(f: Formula, mapping: Mapping[Variable, Variable]) -> Formula:
    """Simultaneously rename variables, bound and free.

    Free occurrences follow `mapping` (identity elsewhere) and must stay
    distinct.  Binders are renamed through `mapping` too unless that would
    capture a free occurrence, in which case a fresh primed name is used.
    """
    fv = free_vars(f)
    images = {v: mapping.get(v, v) for v in fv}
    if len(set(images.values())) != len(images):
        raise FormulaError(f"renaming is not injective on free variables {sorted(fv)}")
    return _replace(f, mapping, binders=True)


def substitute(f: Formula, mapping: Mapping[Variable, Variable]) -> Formula:
    """Replace free occurrences per `mapping`, avoiding capture.

    Unlike `rename` the map may identify variables, and binders keep their
    names unless they would capture a substituted variable.
    """
    return _replace(f, mapping, binders=False)


def _replace(f: Formula, mapping: Mapping[Variable, Variable], binders: bool) -> Formula:
    for v in mapping.values():
        check_variable(v)
    images = {v: mapping.get(v, v) for v in free_vars(f)}
    avoid = set(all_vars(f)) | set(mapping.values())

    def go(g: Formula, env: dict[Variable, Variable]) -> Formula:
        if isinstance(g, Member):
            return Member(env[g.lhs], env[g.rhs])
        if isinstance(g, Equal):
            return Equal(env[g.lhs], env[g.rhs])
        if isinstance(g, QUANTIFIERS):
            taken = {env[u] for u in free_vars(g.body) if u != g.var}
            target = mapping.get(g.var, g.var) if binders else g.var
            if target in taken:
                target = fresh_variable(target, avoid | taken)
                avoid.add(target)
            inner = dict(env)
            inner[g.var] = target
            return type(g)(target, go(g.body, inner))
        return with_children(g, tuple(go(k, env) for k in children(g)))

    return go(f, images)


def universal_closure(f: Formula) -> Formula:
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def is_bounded(f: Formula) -> bool:
    """True iff every quantifier is guarded: ∀v(v∈t → …) or ∃v(v∈t ∧ …), t ≠ v."""
    for _, node in walk(f):
        if isinstance(node, Forall):
            guard_type = Implies
        elif isinstance(node, Exists):
            guard_type = And
        else:
            continue
        body = node.body
        if not isinstance(body, guard_type):
            return False
        g = body.left
        if not (isinstance(g, Member) and g.lhs == node.var and g.rhs != node.var):
            return False
    return True


def prenex_split(f: Formula) -> tuple[list[Quantifier], Formula]:
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append(f)
        f = f.body
    return prefix, f


def prefix_pattern(f: Formula) -> str:
    prefix, matrix = prenex_split(f)
    for path, node in walk(matrix):
        if isinstance(node, QUANTIFIERS):
            raise NotPrenexError((0,) * len(prefix) + path)
    return "".join("∀" if isinstance(q, Forall) else "∃" for q in prefix)


def flatten_and(f: Formula) -> Formula:
    """Canonical right-nested conjunctions, so association order is ignored."""
    kids = tuple(flatten_and(k) for k in children(f))
    f = with_children(f, kids)
    if not isinstance(f, And):
        return f
    items = []

    def collect(g):
        if isinstance(g, And):
            collect(g.left)
            collect(g.right)
        else:
            items.append(g)

    collect(f)
    return conj(*items)


def same_modulo_and_assoc(f: Formula, g: Formula) -> bool:
    return flatten_and(f) == flatten_and(g)


@dataclass(frozen=True)
class SchemaSlot:
    """One of the X(t), Y(t), Z(r, t) parameters of the choice-set schema."""

    name: str
    params: tuple[Variable, ...]
    body: Formula

    def __post_init__(self):
        arity = {"X": 1, "Y": 1, "Z": 2}.get(self.name)
        if arity is None:
            raise FormulaError(f"unknown schema slot {self.name!r}")
        if len(self.params) != arity:
            raise FormulaError(f"slot {self.name} takes {arity} parameter(s)")
        bad = free_vars(self.body) & {"a", "b"}
        if bad:
            raise FormulaError(f"slot {self.name} has {sorted(bad)} free")

    def instantiate(self, *args: Variable) -> Formula:
        return substitute(self.body, dict(zip(self.params, args)))


def build_choice_schema(X: SchemaSlot, Y: SchemaSlot, Z: SchemaSlot) -> tuple[Formula, Formula, Formula]:
    """Return (premise, A, B) where

    premise = ∀t (Y(t) → X(t))
    A       = ∃b X(b) → ∃a (Y(a) ∧ ∀b Z(b, a))
    B       = ∃a ∀b [(X(b) → Y(a)) ∧ (Y(a) → Z(b, a))]
    """
    if (X.name, Y.name, Z.name) != ("X", "Y", "Z"):
        raise FormulaError("slots must be given in X, Y, Z order")
    t = "t"
    premise = Forall(t, Implies(Y.instantiate(t), X.instantiate(t)))
    a_form = Implies(
        Exists("b", X.instantiate("b")),
        Exists("a", And(Y.instantiate("a"), Forall("b", Z.instantiate("b", "a")))),
    )
    b_form = Exists("a", Forall("b", And(
        Implies(X.instantiate("b"), Y.instantiate("a")),
        Implies(Y.instantiate("a"), Z.instantiate("b", "a")),
    )))
    return premise, a_form, b_form
