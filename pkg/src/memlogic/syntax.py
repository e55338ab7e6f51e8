"""Text syntax for membership formulas.

Grammar (loosest binding first; every binary connective is right-associative)::

    iff     := implies ('<->' iff)?
    implies := or ('->' implies)?
    or      := and ('|' or)?
    and     := unary ('&' and)?
    unary   := '~' unary | quant | atom | '(' iff ')' | '[' iff ']'
    quant   := ('A' | 'E' | 'forall' | 'exists') VAR ['in' VAR] ['.'] iff
    atom    := VAR ('in' | '=' | '!=' | 'notin') VAR

A quantifier body extends as far right as possible.  `A v in t. p` is
shorthand for `A v. v in t -> p` and `E v in t. p` for `E v. v in t & p`.
Unicode aliases: ¬ ∧ ∨ → ↔ ∀ ∃ ∈ ∉ ≠.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
)

RESERVED = {"A", "E", "forall", "exists", "in", "notin"}

_ALIASES = {
    "¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "∀": "A", "∃": "E",
    "∈": "in", "∉": "notin", "≠": "!=", "forall": "A", "exists": "E", "[": "(", "]": ")",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|!=|[~&|().=\[\]¬∧∨→↔∀∃∈∉≠])
  | (?P<ident>[A-Za-z][A-Za-z0-9_'*]*)
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # canonical operator text, or "ident", or "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        raw = m.group()
        col = pos - line_start + 1
        if m.lastgroup == "op":
            tokens.append(Token(_ALIASES.get(raw, raw), raw, line, col))
        elif m.lastgroup == "ident":
            kind = _ALIASES.get(raw, raw) if raw in RESERVED else "ident"
            tokens.append(Token(kind, raw, line, col))
        for nl in re.finditer("\n", raw):
            line += 1
            line_start = pos + nl.end()
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str):
        t = self.tok
        where = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{message}, found {where}", t.line, t.column)

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def variable(self) -> str:
        if self.tok.kind != "ident":
            if self.tok.text in RESERVED:
                self.error("reserved word used as variable")
            self.error("expected variable")
        return self.take("ident").text

    def parse(self) -> Formula:
        f = self.iff()
        if self.tok.kind != "eof":
            self.error("unexpected token")
        return f

    def _binary(self, op: str, node, sub, same):
        left = sub()
        if self.accept(op):
            return node(left, same())
        return left

    def iff(self):
        return self._binary("<->", Iff, self.implies, self.iff)

    def implies(self):
        return self._binary("->", Implies, self.or_, self.implies)

    def or_(self):
        return self._binary("|", Or, self.and_, self.or_)

    def and_(self):
        return self._binary("&", And, self.unary, self.and_)

    def unary(self):
        kind = self.tok.kind
        if self.accept("~"):
            return Not(self.unary())
        if kind in ("A", "E"):
            self.i += 1
            v = self.variable()
            guard = None
            if self.accept("in"):
                guard = Member(v, self.variable())
            self.accept(".")
            body = self.iff()
            if kind == "A":
                return Forall(v, body if guard is None else Implies(guard, body))
            return Exists(v, body if guard is None else And(guard, body))
        if self.accept("("):
            f = self.iff()
            self.take(")")
            return f
        return self.atom()

    def atom(self):
        lhs = self.variable()
        kind = self.tok.kind
        if kind not in ("in", "=", "!=", "notin"):
            self.error("expected 'in', '=', '!=' or 'notin'")
        self.i += 1
        rhs = self.variable()
        if kind == "in":
            return Member(lhs, rhs)
        if kind == "=":
            return Equal(lhs, rhs)
        if kind == "!=":
            return Not(Equal(lhs, rhs))
        return Not(Member(lhs, rhs))


def parse(text: str) -> Formula:
    return _Parser(text).parse()


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_ASCII = {Iff: "<->", Implies: "->", Or: "|", And: "&", Forall: "A", Exists: "E",
          Not: "~", Member: "in", Equal: "="}
_UNICODE = {Iff: "↔", Implies: "→", Or: "∨", And: "∧", Forall: "∀", Exists: "∃",
            Not: "¬", Member: "∈", Equal: "="}


def print_formula(f: Formula, unicode: bool = False) -> str:
    """Render with the fewest parentheses that still parse back to `f`."""
    sym = _UNICODE if unicode else _ASCII

    def go(g: Formula, rightmost: bool) -> str:
        if isinstance(g, (Member, Equal)):
            return f"{g.lhs} {sym[type(g)]} {g.rhs}"
        if isinstance(g, Not):
            inner = g.body
            if type(inner) in _PREC:
                return f"{sym[Not]}({go(inner, True)})"
            if isinstance(inner, (Forall, Exists)) and not rightmost:
                return f"{sym[Not]}({go(inner, True)})"
            return sym[Not] + go(inner, rightmost)
        if isinstance(g, (Forall, Exists)):
            gap = "" if unicode else " "
            text = f"{sym[type(g)]}{gap}{g.var}. {go(g.body, True)}"
            return text if rightmost else f"({text})"
        p = _PREC[type(g)]
        left, right = g.left, g.right
        ltext = go(left, False)
        if type(left) in _PREC and _PREC[type(left)] <= p:
            ltext = f"({go(left, True)})"
        if type(right) in _PREC and _PREC[type(right)] < p:
            rtext = f"({go(right, True)})"
        else:
            rtext = go(right, rightmost)
        return f"{ltext} {sym[type(g)]} {rtext}"

    return go(f, True)


def token_count(rendering: str) -> int:
    """Symbol count of a rendering as written.

    Atom = 3, negated-atom sugar (∉, ≠) = 4, binary connective = 1, ¬ = 1,
    quantifier with its variable = 2, each parenthesis or bracket = 1.
    A bounded quantifier `∀v∈t` counts as quantifier plus atom.
    """
    total = 0
    for t in tokenize(rendering):
        if t.kind in ("in", "="):
            total += 3
        elif t.kind in ("notin", "!="):
            total += 4
        elif t.kind in ("&", "|", "->", "<->", "~", "(", ")"):
            total += 1
        elif t.kind in ("A", "E"):
            total += 2
    return total
