"""Hereditarily finite sets as integers.

A set is coded by ``code(s) = Σ 2**code(e)`` over its elements e, so the
elements of s are the positions of the set bits of its code.  Every
nonnegative integer codes exactly one set, extensional equality is integer
equality, and the stage V_k is exactly the codes below |V_k|.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .model import FinStructure

HFSet = int
EMPTY: HFSet = 0
DEFAULT_MAX_RANK = 5
BRANCHES = ("none", "pair_with_empty", "pair_with_yprime")


class RankCapError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ConstructionError(AssertionError):
    def __init__(self, message: str, trace: "ChoiceTrace"):
        super().__init__(message)
        self.trace = trace


def max_rank(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get("QC_MAX_RANK", DEFAULT_MAX_RANK))


def stage_size(k: int) -> int:
    """|V_k|: 0, 1, 2, 4, 16, 65536, ..."""
    size = 0
    for _ in range(k):
        size = 1 << size
    return size


def v_universe(k: int, cap: Optional[int] = None) -> list[HFSet]:
    """All sets of rank below k, in code order."""
    if k < 0:
        raise ValueError("rank must be nonnegative")
    if k > max_rank(cap):
        raise RankCapError(f"rank {k} exceeds cap {max_rank(cap)} (set QC_MAX_RANK to raise it)")
    return list(range(stage_size(k)))


def rank(s: HFSet) -> int:
    k = 0
    while stage_size(k) <= s:
        k += 1
    return k


@lru_cache(maxsize=1 << 17)
def _members(s: HFSet) -> tuple[HFSet, ...]:
    out = []
    i = 0
    while s:
        if s & 1:
            out.append(i)
        s >>= 1
        i += 1
    return tuple(out)


def members(s: HFSet) -> tuple[HFSet, ...]:
    return _members(s)


def make_set(elements: Iterable[HFSet]) -> HFSet:
    code = 0
    for e in elements:
        code |= 1 << e
    return code


def contains(s: HFSet, e: HFSet) -> bool:
    return bool(s >> e & 1)


def union_of(x: HFSet) -> HFSet:
    """⋃x"""
    out = 0
    for z in members(x):
        out |= z
    return out


def to_text(s: HFSet) -> str:
    return "{" + ",".join(to_text(e) for e in members(s)) + "}"


def parse_hf(text: str) -> HFSet:
    """Nested braces (``{}``, ``{{},{{}}}``, ``∅`` allowed) or a decimal code."""
    text = text.strip()
    if text.isdigit():
        return int(text)
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def one() -> HFSet:
        nonlocal pos
        skip()
        if text.startswith("∅", pos):
            pos += 1
            return EMPTY
        if pos >= len(text) or text[pos] != "{":
            raise ValueError(f"expected '{{' at offset {pos} in {text!r}")
        pos += 1
        elements = []
        skip()
        if pos < len(text) and text[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            elements.append(one())
            skip()
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == "}":
                pos += 1
                return make_set(elements)
            raise ValueError(f"expected ',' or '}}' at offset {pos} in {text!r}")

    out = one()
    skip()
    if pos != len(text):
        raise ValueError(f"trailing text at offset {pos} in {text!r}")
    return out


# the choice-set conditions

def is_choice_set(y: HFSet, x: HFSet) -> bool:
    """Every nonempty z ∈ x meets y in exactly one element."""
    return all(z == 0 or (z & y).bit_count() == 1 for z in members(x))


def sat_ach1(x: HFSet) -> bool:
    return all(z != 0 for z in members(x))


def sat_ach2(x: HFSet) -> bool:
    zs = members(x)
    return all(zs[i] & zs[j] == 0 for i in range(len(zs)) for j in range(i + 1, len(zs)))


def _others_union(x: HFSet, z: HFSet) -> HFSet:
    out = 0
    for w in members(x):
        if w != z:
            out |= w
    return out


def sat_ach_star(x: HFSet) -> bool:
    """Each element of x has a member that lies in no other element of x."""
    return all(z & ~_others_union(x, z) for z in members(x))


def phi(z: HFSet, x: HFSet) -> HFSet:
    """z_x = {a ∈ z | a lies in no element of x other than z}"""
    return z & ~_others_union(x, z)


def star(x: HFSet) -> HFSet:
    """x* = {z_x | z ∈ x}"""
    return make_set(phi(z, x) for z in members(x))


def least_choice_set(x: HFSet) -> Optional[HFSet]:
    """Choice set for x with the smallest code, or None if there is none."""
    zs = [z for z in members(x) if z]
    if sat_ach2(x):
        # disjoint: pick each element's least member independently
        return make_set(members(z)[0] for z in zs)
    universe = union_of(x)
    m = 0
    while True:
        if is_choice_set(m, x):
            return m
        m = (m - universe) & universe  # next submask in increasing order
        if m == 0:
            return None


@dataclass(frozen=True)
class ChoiceTrace:
    x: HFSet
    x_star: HFSet
    y: Optional[HFSet]
    y_prime: Optional[HFSet]
    branch: str
    result: Optional[HFSet]

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = to_text(v) if isinstance(v, int) and k != "branch" else v
        return out


def construct_choice_set(x: HFSet, faulty_patch: bool = False) -> ChoiceTrace:
    """Build a choice set for x that is not an element of x.

    Requires that every element of x has a private member.  A choice set y
    for x* is taken code-least, cut down to y' = {a ∈ y | a ∈ z_x for some
    z ∈ x}; if y' happens to be an element of x then x = {{a}} and y' is
    replaced by {a, b} with b = y' when a = ∅ and b = ∅ otherwise.
    `faulty_patch` swaps those two cases (used for fault injection).
    """
    if not sat_ach_star(x):
        raise PreconditionError(f"{to_text(x)} has an element with no private member")
    x_star = star(x)
    y = least_choice_set(x_star)
    if y is None:
        raise ConstructionError("no choice set for x*", ChoiceTrace(x, x_star, None, None, "none", None))
    zxs = [phi(z, x) for z in members(x)]
    y_prime = make_set(a for a in members(y) if any(contains(zx, a) for zx in zxs))
    if not contains(x, y_prime):
        branch, result = "none", y_prime
    else:
        (a,) = members(y_prime)
        use_yprime = (a == EMPTY) != faulty_patch
        if use_yprime:
            branch, b = "pair_with_yprime", y_prime
        else:
            branch, b = "pair_with_empty", EMPTY
        result = make_set((a, b))
    trace = ChoiceTrace(x, x_star, y, y_prime, branch, result)
    if contains(x, result) or not is_choice_set(result, x):
        raise ConstructionError(f"construction failed for x = {to_text(x)}", trace)
    return trace


def structure_of(k: int, cap: Optional[int] = None) -> tuple[FinStructure, dict[HFSet, int]]:
    """V_k as a finite structure with true membership; element i is code i."""
    elements = v_universe(k, cap)
    n = len(elements)
    if n == 0:
        raise ValueError("V_0 is empty; structures need a nonempty domain")
    edges = [(i, j) for j in elements for i in members(j)]
    return FinStructure.from_edges(n, edges), {e: i for i, e in enumerate(elements)}


SWEEP_PROPERTIES = (
    "phi-subset",            # z_x ⊆ z
    "phi-misses-others",     # z ≠ z' ⇒ z_x ∩ z' = ∅
    "phi-disjoint",          # z ≠ z' ⇒ z_x ∩ z'_x = ∅
    "private-iff-star-nonempty",  # AC_h*(x) ⟺ AC_h1(x*)
    "star-disjoint",         # AC_h2(x*)
    "disjoint-implies-private",   # AC_h1(x) ∧ AC_h2(x) ⇒ AC_h*(x)
    "cut-is-intersection",   # y' = y ∩ ⋃x*
    "phi-is-intersection",   # z_x = z ∩ ⋃x*
    "construction",          # result ∉ x and a choice set for x
)


def check_one(x: HFSet, faulty_patch: bool = False) -> list[str]:
    """Names of the sweep properties that fail at x."""
    bad = []
    zs = members(x)
    zxs = [phi(z, x) for z in zs]
    if any(zx & ~z for z, zx in zip(zs, zxs)):
        bad.append("phi-subset")
    pairs = [(i, j) for i in range(len(zs)) for j in range(len(zs)) if i != j]
    if any(zxs[i] & zs[j] for i, j in pairs):
        bad.append("phi-misses-others")
    if any(zxs[i] & zxs[j] for i, j in pairs):
        bad.append("phi-disjoint")
    x_star = star(x)
    private = sat_ach_star(x)
    if private != sat_ach1(x_star):
        bad.append("private-iff-star-nonempty")
    if not sat_ach2(x_star):
        bad.append("star-disjoint")
    if sat_ach1(x) and sat_ach2(x) and not private:
        bad.append("disjoint-implies-private")
    if private:
        big_union = union_of(x_star)
        try:
            trace = construct_choice_set(x, faulty_patch)
        except ConstructionError as err:
            trace = err.trace
            bad.append("construction")
        if trace.y is not None and trace.y_prime != trace.y & big_union:
            bad.append("cut-is-intersection")
        if any(zx != z & big_union for z, zx in zip(zs, zxs)):
            bad.append("phi-is-intersection")
    return bad


def sweep(k: int, lo: int = 0, hi: Optional[int] = None, faulty_patch: bool = False) -> dict[str, Optional[int]]:
    """Check every subset x of V_k with code in [lo, hi).

    Returns each property's least failing code, or None where none fails.
    """
    total = stage_size(k + 1) if k + 1 <= max_rank() else None
    if total is None:
        raise RankCapError(f"subsets of V_{k} exceed rank cap {max_rank()}")
    hi = total if hi is None else min(hi, total)
    first: dict[str, Optional[int]] = {p: None for p in SWEEP_PROPERTIES}
    for x in range(lo, hi):
        for p in check_one(x, faulty_patch):
            if first[p] is None:
                first[p] = x
    return first


def empty_elements_removed(x: HFSet) -> HFSet:
    """{z ∈ x | z ≠ ∅}"""
    return x & ~1
