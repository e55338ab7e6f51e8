import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import VARS, formulas, structure_and_assignment, structures as st_structures
from memlogic import catalog
from memlogic.formula import And, Equal, Exists, Forall, Not, free_vars, rename, universal_closure
from memlogic.model import (
    Counterexample,
    EvaluationError,
    FinStructure,
    SizeCapError,
    ValidUpTo,
    check_equiv,
    check_valid,
    evaluate,
    matrices,
    structures,
    truth_table,
)
from memlogic.randgen import random_formulas
from memlogic.syntax import parse


def brute_least_counterexample(f, nmax):
    free = sorted(free_vars(f))
    for n in range(1, nmax + 1):
        for s in structures(n):
            for values in itertools.product(range(n), repeat=len(free)):
                asg = dict(zip(free, values))
                if not evaluate(s, asg, f):
                    return s, asg
    return None


def test_structure_counts():
    assert [sum(1 for _ in structures(n)) for n in (1, 2, 3)] == [2, 16, 512]


def test_size_cap(monkeypatch):
    with pytest.raises(SizeCapError):
        next(structures(6))
    assert sum(1 for _ in structures(2, cap=2)) == 16
    monkeypatch.setenv("QC_MAX_N", "1")
    with pytest.raises(SizeCapError):
        check_valid(parse("A x. x = x"), 2)


def test_structure_encoding():
    s = FinStructure.from_edges(3, [(0, 1), (2, 2)])
    assert s.member(0, 1) and s.member(2, 2) and not s.member(1, 0)
    assert s.edges() == [(0, 1), (2, 2)]
    assert FinStructure.from_matrix(s.matrix) == s
    assert (matrices(3, np.array([s.code]))[0] == s.matrix).all()


def test_evaluate_examples():
    ac = catalog.get("AC").formula
    assert evaluate(FinStructure(1, 0), {}, ac)
    assert evaluate(FinStructure(1, 1), {}, ac)
    for s in structures(2):
        assert evaluate(s, {"x": 0}, parse("x = x"))


def test_evaluate_rejects_bad_assignments():
    s = FinStructure(2, 0)
    with pytest.raises(EvaluationError):
        evaluate(s, {}, parse("x in y"))
    with pytest.raises(EvaluationError):
        evaluate(s, {"x": 2, "y": 0}, parse("x in y"))


@given(formulas, st_structures())
def test_truth_table_matches_reference_evaluator(f, s):
    free = sorted(free_vars(f))
    table = truth_table(f, s.matrix[None], free)[0]
    for values in itertools.product(range(s.size), repeat=len(free)):
        assert bool(table[values]) == evaluate(s, dict(zip(free, values)), f)


def test_truth_table_on_catalog_sentences():
    names = ["AC", "AC*", "AC**", "AC**-bar", "C3", "phi"]
    for n in (1, 2):
        for s in structures(n):
            for name in names:
                f = catalog.get(name).formula
                free = sorted(free_vars(f))
                table = truth_table(f, s.matrix[None], free)[0]
                for values in itertools.product(range(n), repeat=len(free)):
                    assert bool(table[values]) == evaluate(s, dict(zip(free, values)), f)


@given(formulas, formulas, structure_and_assignment())
def test_metamorphic_laws(f, g, sa):
    s, asg = sa
    assert evaluate(s, asg, Not(f)) == (not evaluate(s, asg, f))
    assert evaluate(s, asg, And(f, g)) == (evaluate(s, asg, f) and evaluate(s, asg, g))
    for v in ("x", "a"):
        values = [evaluate(s, {**asg, v: e}, f) for e in range(s.size)]
        assert evaluate(s, asg, Forall(v, f)) == all(values)
        assert evaluate(s, asg, Exists(v, f)) == any(values)


@given(formulas, structure_and_assignment(), st.randoms(use_true_random=False))
def test_invariant_under_domain_permutation(f, sa, rnd):
    s, asg = sa
    perm = list(range(s.size))
    rnd.shuffle(perm)
    moved = FinStructure.from_edges(s.size, [(perm[i], perm[j]) for i, j in s.edges()])
    assert evaluate(moved, {v: perm[e] for v, e in asg.items()}, f) == evaluate(s, asg, f)


def test_check_valid_examples():
    v = check_valid(parse("A x. A y. x = y"), 2)
    assert isinstance(v, Counterexample)
    assert v.structure == FinStructure(2, 0)
    assert v.to_json() == {"verdict": "counterexample", "domain_size": 2, "membership": [], "assignment": {}}
    assert check_valid(catalog.get("AC*-implies-AC").formula, 3) == ValidUpTo(3)
    assert check_valid(catalog.get("guards-exclusive").formula, 3, closure=True) == ValidUpTo(3)


def test_check_valid_needs_closure_for_free_variables():
    with pytest.raises(EvaluationError):
        check_valid(parse("x in y"), 2)


def test_check_equiv_examples():
    assert check_equiv(catalog.get("AC*").formula, catalog.get("AC**").formula, 3) == ValidUpTo(3)
    assert check_equiv(catalog.get("AC**").formula, catalog.get("AC**-bar").formula, 3) == ValidUpTo(3)


@pytest.mark.parametrize("seed", range(3))
def test_least_counterexample_matches_brute_force(seed):
    for f in random_formulas(seed, 40, depth=4, variables=("x", "y", "z")):
        fast = check_valid(f, 2, closure=True)
        slow = brute_least_counterexample(f, 2)
        if slow is None:
            assert fast == ValidUpTo(2)
        else:
            assert isinstance(fast, Counterexample)
            assert (fast.structure, fast.assignment) == slow


@given(formulas)
@settings(max_examples=30)
def test_counterexamples_reevaluate_false(f):
    v = check_valid(f, 2, closure=True)
    if not v.ok:
        assert not evaluate(v.structure, v.assignment, f)


@given(formulas)
@settings(max_examples=20)
def test_alpha_equivalence(f):
    g = rename(f, {"a": "b", "b": "a"})
    if free_vars(f) <= {"x", "y", "z"}:
        assert check_equiv(f, g, 2).ok


def test_parallel_search_matches_sequential():
    cases = [parse("A x. A y. x in y -> y in x"), parse("E x. A y. ~y in x"),
             parse("A x. E y. x in y"), universal_closure(parse("x in y | y in x | x = y")),
             catalog.get("AC*-implies-AC").formula]
    for f in cases:
        assert check_valid(f, 3, closure=True, jobs=2) == check_valid(f, 3, closure=True)


def test_parallel_search_finds_the_least_witness_past_the_first_chunk():
    f = parse("~E x. E y. E z. x != y & y != z & x != z & x in y & y in z & z in x")
    seq = check_valid(f, 3)
    assert seq.structure == FinStructure.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert seq.structure.code == 98
    for jobs in (2, 3):
        assert check_valid(f, 3, jobs=jobs) == seq
