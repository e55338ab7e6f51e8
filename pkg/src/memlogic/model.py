"""Finite membership structures, evaluation, and exhaustive validity checks.

Structures of size n are numbered by a row-major bit counter: structure
``code`` has ``i ∈ j`` iff bit ``i * n + j`` of ``code`` is set.  The
enumeration order is code order, sizes ascending.

Two evaluators are provided.  `evaluate` is the plain recursive Tarskian
semantics on one structure and one assignment.  `truth_table` evaluates a
formula on a batch of structures at once, over every assignment of its
free variables, using one numpy axis per variable; it is what the
exhaustive checkers run on, and every counterexample it finds is
re-checked with `evaluate` before it is returned.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

import numpy as np

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
    free_vars,
)

DEFAULT_MAX_N = 5
# bound on booleans per intermediate array when batching structures
_BATCH_BUDGET = 1 << 22


class EvaluationError(ValueError):
    pass


class SizeCapError(ValueError):
    pass


def max_size(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get("QC_MAX_N", DEFAULT_MAX_N))


@dataclass(frozen=True)
class FinStructure:
    """Domain {0..size-1} with an arbitrary membership relation."""

    size: int
    code: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("structure size must be at least 1")
        if not 0 <= self.code < 1 << (self.size * self.size):
            raise ValueError(f"code {self.code} out of range for size {self.size}")

    @classmethod
    def from_edges(cls, size: int, edges) -> "FinStructure":
        code = 0
        for i, j in edges:
            code |= 1 << (i * size + j)
        return cls(size, code)

    @classmethod
    def from_matrix(cls, matrix) -> "FinStructure":
        m = np.asarray(matrix, dtype=bool)
        n = m.shape[0]
        return cls.from_edges(n, zip(*np.nonzero(m)))

    def member(self, i: int, j: int) -> bool:
        return bool(self.code >> (i * self.size + j) & 1)

    @property
    def matrix(self) -> np.ndarray:
        n = self.size
        bits = [(self.code >> k) & 1 for k in range(n * n)]
        return np.array(bits, dtype=bool).reshape(n, n)

    def edges(self) -> list[tuple[int, int]]:
        n = self.size
        return [(i, j) for i in range(n) for j in range(n) if self.member(i, j)]


Assignment = Mapping[str, int]


def evaluate(s: FinStructure, asg: Assignment, f: Formula) -> bool:
    missing = free_vars(f) - set(asg)
    if missing:
        raise EvaluationError(f"unassigned free variable(s) {sorted(missing)}")
    for v, e in asg.items():
        if not 0 <= e < s.size:
            raise EvaluationError(f"{v} ↦ {e} is outside the domain of size {s.size}")
    return _eval(s, dict(asg), f)


def _eval(s: FinStructure, asg: dict, f: Formula) -> bool:
    if isinstance(f, Member):
        return s.member(asg[f.lhs], asg[f.rhs])
    if isinstance(f, Equal):
        return asg[f.lhs] == asg[f.rhs]
    if isinstance(f, Not):
        return not _eval(s, asg, f.body)
    if isinstance(f, And):
        return _eval(s, asg, f.left) and _eval(s, asg, f.right)
    if isinstance(f, Or):
        return _eval(s, asg, f.left) or _eval(s, asg, f.right)
    if isinstance(f, Implies):
        return not _eval(s, asg, f.left) or _eval(s, asg, f.right)
    if isinstance(f, Iff):
        return _eval(s, asg, f.left) == _eval(s, asg, f.right)
    test = all if isinstance(f, Forall) else any
    return test(_eval(s, {**asg, f.var: e}, f.body) for e in range(s.size))


def structure_count(n: int) -> int:
    return 1 << (n * n)


def structures(n: int, cap: Optional[int] = None) -> Iterator[FinStructure]:
    if n < 1:
        raise ValueError("structure size must be at least 1")
    if n > max_size(cap):
        raise SizeCapError(f"size {n} exceeds cap {max_size(cap)} (set QC_MAX_N to raise it)")
    for code in range(structure_count(n)):
        yield FinStructure(n, code)


def chunks(n: int, k: int) -> list[range]:
    """Split the size-n enumeration into k contiguous code ranges."""
    total = structure_count(n)
    k = max(1, min(k, total))
    bounds = [total * i // k for i in range(k + 1)]
    return [range(bounds[i], bounds[i + 1]) for i in range(k)]


def matrices(n: int, codes: np.ndarray) -> np.ndarray:
    """Membership matrices for an array of structure codes, shape (B, n, n)."""
    codes = np.asarray(codes, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n * n, dtype=np.int64)) & 1
    return bits.astype(bool).reshape(len(codes), n, n)


def _depth(f: Formula) -> int:
    if isinstance(f, (Member, Equal)):
        return 0
    if isinstance(f, (Forall, Exists)):
        return 1 + _depth(f.body)
    if isinstance(f, Not):
        return _depth(f.body)
    return max(_depth(f.left), _depth(f.right))


def truth_table(f: Formula, mats: np.ndarray, free: Optional[list[str]] = None) -> np.ndarray:
    """Truth values of f on every structure in `mats` (shape (B, n, n)).

    Returns a boolean array of shape (B, n, ..., n) with one axis per free
    variable, in the order of `free` (default: sorted names).
    """
    if free is None:
        free = sorted(free_vars(f))
    missing = free_vars(f) - set(free)
    if missing:
        raise EvaluationError(f"unassigned free variable(s) {sorted(missing)}")
    B, n, _ = mats.shape
    base = 1 + len(free)
    ndim = base + _depth(f)
    mats_t = mats.transpose(0, 2, 1)

    def placed(arr: np.ndarray, i: int, j: int, batch: int) -> np.ndarray:
        shape = [1] * ndim
        shape[0] = batch
        shape[i] = n
        shape[j] = n
        return arr.reshape(shape)

    def go(g: Formula, env: dict, depth: int) -> np.ndarray:
        if isinstance(g, Member):
            i, j = env[g.lhs], env[g.rhs]
            if i == j:
                shape = [1] * ndim
                shape[0], shape[i] = B, n
                return np.diagonal(mats, axis1=1, axis2=2).reshape(shape)
            return placed(mats if i < j else mats_t, i, j, B)
        if isinstance(g, Equal):
            i, j = env[g.lhs], env[g.rhs]
            if i == j:
                return np.ones((1,) * ndim, dtype=bool)
            return placed(np.eye(n, dtype=bool), min(i, j), max(i, j), 1)
        if isinstance(g, Not):
            return ~go(g.body, env, depth)
        if isinstance(g, And):
            return go(g.left, env, depth) & go(g.right, env, depth)
        if isinstance(g, Or):
            return go(g.left, env, depth) | go(g.right, env, depth)
        if isinstance(g, Implies):
            return ~go(g.left, env, depth) | go(g.right, env, depth)
        if isinstance(g, Iff):
            return go(g.left, env, depth) == go(g.right, env, depth)
        axis = base + depth
        body = go(g.body, {**env, g.var: axis}, depth + 1)
        if isinstance(g, Forall):
            return body.all(axis=axis, keepdims=True)
        return body.any(axis=axis, keepdims=True)

    env = {v: 1 + k for k, v in enumerate(free)}
    out = go(f, env, 0)
    full = (B,) + (n,) * len(free) + (1,) * (ndim - base)
    return np.broadcast_to(out, full).reshape((B,) + (n,) * len(free))


@dataclass(frozen=True)
class ValidUpTo:
    nmax: int
    ok: bool = field(default=True, init=False)

    def to_json(self) -> dict:
        return {"verdict": "valid_up_to", "nmax": self.nmax}


@dataclass(frozen=True)
class Counterexample:
    structure: FinStructure
    assignment: dict
    ok: bool = field(default=False, init=False)

    def to_json(self) -> dict:
        return {
            "verdict": "counterexample",
            "domain_size": self.structure.size,
            "membership": [list(e) for e in self.structure.edges()],
            "assignment": dict(sorted(self.assignment.items())),
        }


Verdict = Union[ValidUpTo, Counterexample]


def _batch_size(n: int, f: Formula, nfree: int) -> int:
    active = nfree + _depth(f)
    return max(1, _BATCH_BUDGET // max(1, n ** active))


def _scan(f: Formula, free: list, n: int, start: int, stop: int):
    """First failing (code, flat assignment index) in [start, stop), or None."""
    step = _batch_size(n, f, len(free))
    for lo in range(start, stop, step):
        codes = np.arange(lo, min(stop, lo + step), dtype=np.int64)
        table = truth_table(f, matrices(n, codes), free).reshape(len(codes), -1)
        good = table.all(axis=1)
        if not good.all():
            b = int(np.argmin(good))
            return lo + b, int(np.argmin(table[b]))
    return None


def check_valid(
    f: Formula,
    nmax: int,
    closure: bool = False,
    jobs: int = 1,
    cap: Optional[int] = None,
) -> Verdict:
    """Search sizes 1..nmax for a structure and assignment falsifying f.

    Free variables are rejected unless `closure` is set, in which case they
    are read universally.  The witness is the least one: smallest size,
    then lowest structure code, then the first assignment in row-major
    order over the sorted free variables.  It is the same for any `jobs`.
    """
    free = sorted(free_vars(f))
    if free and not closure:
        raise EvaluationError(f"formula has free variables {free}; pass closure=True")
    if nmax > max_size(cap):
        raise SizeCapError(f"nmax {nmax} exceeds cap {max_size(cap)} (set QC_MAX_N to raise it)")
    for n in range(1, nmax + 1):
        hit = _search_size(f, free, n, jobs)
        if hit is not None:
            code, flat = hit
            values = np.unravel_index(flat, (n,) * len(free)) if free else ()
            asg = {v: int(e) for v, e in zip(free, values)}
            s = FinStructure(n, code)
            if evaluate(s, asg, f):
                raise AssertionError("vectorized evaluator disagrees with reference semantics")
            return Counterexample(s, asg)
    return ValidUpTo(nmax)


def _search_size(f, free, n, jobs):
    if jobs <= 1 or structure_count(n) < 64:
        return _scan(f, free, n, 0, structure_count(n))
    parts = chunks(n, jobs * 4)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_scan, *zip(*[(f, free, n, r.start, r.stop) for r in parts])))
    hits = [r for r in results if r is not None]
    return min(hits) if hits else None


def check_equiv(f: Formula, g: Formula, nmax: int, jobs: int = 1, cap: Optional[int] = None) -> Verdict:
    return check_valid(Iff(f, g), nmax, closure=True, jobs=jobs, cap=cap)
