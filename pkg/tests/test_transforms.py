import json

import pytest
from hypothesis import given, settings

from conftest import formulas
from memlogic import catalog
from memlogic.formula import (
    ATOMS,
    Exists,
    Forall,
    Iff,
    Implies,
    Member,
    Not,
    NotPrenexError,
    free_vars,
    prefix_pattern,
    quantifier_count,
    rename,
)
from memlogic.model import ValidUpTo, check_equiv
from memlogic.syntax import parse, print_formula
from memlogic.transforms import (
    HYPOTHESIS_RENAMING,
    RewriteStep,
    RuleError,
    Trace,
    TraceError,
    add_vacuous,
    derive_ac_double_star,
    derive_choice_conclusion,
    derive_negated_hypothesis,
    drop_vacuous,
    expand_iff,
    first_failure,
    hoist,
    implication_to_disjunction,
    merge_guarded_disjunction,
    prenex,
    push_negation,
    verify_trace,
)


def test_push_negation_examples():
    assert push_negation(parse("~A z. z in x -> z = z")) == parse("E z. z in x & ~z = z")
    assert push_negation(parse("~~a in z")) == parse("a in z")
    assert push_negation(parse("~(E a. a in z & a = a)")) == parse("A a. a in z -> ~a = a")


def test_hoist_flips_antecedent_quantifier():
    g, trace = hoist(parse("(E b. b in z) -> x in y"))
    assert g == parse("A b. b in z -> x in y")
    assert [s.rule for s in trace.steps] == ["hoist_left"]
    assert "flipped" in trace.steps[0].justification


def test_hoist_guarded_conclusion():
    b = print_formula(catalog.get("B").formula)
    g, _ = hoist(parse(f"E y. y notin x & A z. E a. A b. {b}"))
    assert g == parse(f"E y. A z. E a. A b. y notin x & ({b})")


def test_hoist_renames_on_collision():
    g, trace = hoist(parse("x in y & E x. x in y"))
    assert prefix_pattern(g) == "∃"
    assert "rename" in [s.rule for s in trace.steps]
    assert check_equiv(parse("x in y & E x. x in y"), g, 3).ok


def test_prenex_handles_negation_and_iff():
    f = parse("~(A x. x in y) <-> E z. z in y")
    g, trace = prenex(f)
    prefix_pattern(g)
    assert verify_trace(trace, 3).ok
    assert prefix_pattern(prenex(catalog.get("C3").formula)[0]) == "∀∃∀"


def test_add_vacuous_examples():
    f = parse("E y. A z. E a. y in x & (z in y -> a in x & a != y & z in a)")
    assert add_vacuous(f, "b", Forall) == parse(
        "E y. A z. E a. A b. y in x & (z in y -> a in x & a != y & z in a)"
    )
    with pytest.raises(RuleError):
        add_vacuous(f, "x", Forall)
    with pytest.raises(RuleError):
        add_vacuous(f, "a", Forall)


def test_drop_vacuous():
    assert drop_vacuous(parse("A b. x in y")) == parse("x in y")
    with pytest.raises(RuleError):
        drop_vacuous(parse("A x. x in y"))


def test_merge_requires_complementary_guards():
    with pytest.raises(RuleError):
        merge_guarded_disjunction(parse("(E y. y in x & y = y) | E y. y in x & y = y"))
    with pytest.raises(RuleError):
        merge_guarded_disjunction(parse("(E y. A z. z in x & y = y) | E y. A z. ~z in x & y = y"))
    g, why = merge_guarded_disjunction(parse("(E y. y in x & y = y) | E y. ~y in x & y in y"))
    assert g == parse("E y. y in x & y = y | ~y in x & y in y")
    assert "guard" in why


def test_negated_hypothesis_derivation_walks_the_chain():
    start = catalog.get("neg-hyp-1").formula
    trace = derive_negated_hypothesis(start)
    seen = trace.formulas()
    for e in catalog.list_chain("negated-hypothesis"):
        assert e.formula in seen, e.name
    assert HYPOTHESIS_RENAMING == {"z": "y", "a": "z", "z'": "a"}


def test_choice_conclusion_derivation_walks_the_chain():
    trace = derive_choice_conclusion(catalog.get("conclusion-1").formula)
    seen = trace.formulas()
    for e in catalog.list_chain("choice-conclusion"):
        assert e.formula in seen, e.name


def test_full_derivation_reaches_ac_double_star():
    trace = derive_ac_double_star(catalog.get("AC*").formula)
    assert trace.start == catalog.get("AC*").formula
    assert trace.end == catalog.get("AC**").formula
    assert verify_trace(trace, 3) == ValidUpTo(3)
    rules = {s.rule for s in trace.steps}
    assert {"push_negation", "hoist_right", "rename", "add_vacuous", "choice_schema",
            "merge_guarded_disjunction"} <= rules


def test_trace_json_round_trip():
    trace = derive_ac_double_star(catalog.get("AC*").formula)
    data = json.loads(json.dumps(trace.to_json()))
    assert set(data["steps"][0]) == {"rule", "path", "before", "after", "side_condition"}
    assert Trace.from_json(data) == trace


def test_broken_trace_rejected():
    a, b, c = parse("x in y"), parse("~~x in y"), parse("y in x")
    s1 = RewriteStep("push_negation", b, a, (), "double negation")
    s2 = RewriteStep("swap_equality", b, c, (), "bogus")
    with pytest.raises(TraceError):
        Trace(b, (s1, s2))


def test_unsound_step_is_caught():
    a, b = parse("A x. x in y"), parse("E x. x in y")
    trace = Trace(a, (RewriteStep("hoist_left", a, b, (), "wrong"),))
    hit = first_failure(trace, 3)
    assert hit is not None and hit[0] == 0
    assert not verify_trace(trace, 3).ok


def test_single_rename_step_verifies():
    f = catalog.get("C").formula
    g = rename(f, {"a": "b", "b": "a"})
    trace = Trace(f, (RewriteStep("rename", f, g, (), "bijective renaming of bound variables"),))
    assert verify_trace(trace, 3) == ValidUpTo(3)


@given(formulas)
@settings(max_examples=60)
def test_push_negation_preserves_meaning_and_count(f):
    g = push_negation(f)
    assert quantifier_count(g) == quantifier_count(f)
    assert all(isinstance(n.body, ATOMS) for n in _nodes(g) if isinstance(n, Not))
    assert check_equiv(f, g, 2).ok


@given(formulas)
@settings(max_examples=60)
def test_hoist_preserves_meaning_and_count(f):
    g, trace = hoist(f)
    assert quantifier_count(g) == quantifier_count(f)
    assert check_equiv(f, g, 2).ok
    assert trace.end == g


@given(formulas)
@settings(max_examples=60)
def test_prenex_is_prenex_and_equivalent(f):
    g, _ = prenex(f)
    prefix_pattern(g)
    assert free_vars(g) == free_vars(f)
    assert check_equiv(f, g, 2).ok


@given(formulas)
@settings(max_examples=40)
def test_other_rules_preserve_meaning(f):
    assert check_equiv(f, expand_iff(f), 2).ok
    if isinstance(f, Implies):
        assert check_equiv(f, implication_to_disjunction(f), 2).ok


@given(formulas)
@settings(max_examples=40)
def test_add_vacuous_adds_one_quantifier(f):
    g, _ = prenex(f)
    v = "w"
    h = add_vacuous(g, v, Exists)
    assert quantifier_count(h) == quantifier_count(g) + 1
    assert check_equiv(g, h, 2).ok


def _nodes(f):
    from memlogic.formula import walk

    return [n for _, n in walk(f)]


def test_prenex_rejects_nothing_it_produces():
    f = parse("~(A x. x in y) & (E y. y in y) <-> A z. z in z")
    g, _ = prenex(f)
    try:
        prefix_pattern(g)
    except NotPrenexError:
        pytest.fail("prenex output is not prenex")
