"""Seeded random formulas for round-trip and rule checks."""

from __future__ import annotations

import random

from .formula import And, Equal, Exists, Forall, Formula, Iff, Implies, Member, Not, Or

VARIABLES = ("x", "y", "z", "a", "b")
_BINARY = (And, Or, Implies, Iff)


def random_formula(rng: random.Random, depth: int = 5, variables=VARIABLES) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        u, v = rng.choice(variables), rng.choice(variables)
        return Member(u, v) if rng.random() < 0.7 else Equal(u, v)
    roll = rng.random()
    if roll < 0.15:
        return Not(random_formula(rng, depth - 1, variables))
    if roll < 0.4:
        kind = Forall if rng.random() < 0.5 else Exists
        return kind(rng.choice(variables), random_formula(rng, depth - 1, variables))
    op = rng.choice(_BINARY)
    return op(random_formula(rng, depth - 1, variables), random_formula(rng, depth - 1, variables))


def random_formulas(seed: int, count: int, depth: int = 5, variables=VARIABLES) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, depth, variables) for _ in range(count)]
