import pytest
from hypothesis import given, strategies as st

from conftest import formulas
from memlogic import catalog
from memlogic.formula import And, Exists, Forall, Implies, Member, Not, Equal, atom_count, quantifier_count
from memlogic.randgen import random_formulas
from memlogic.syntax import ParseError, parse, print_formula, token_count, tokenize


def test_parse_example():
    assert parse("A z. z in x -> E a. a in z") == Forall(
        "z", Implies(Member("z", "x"), Exists("a", Member("a", "z")))
    )


def test_parse_official_ac_double_star():
    f = parse(catalog.get("AC**").official_rendering)
    assert quantifier_count(f) == 5


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse("x in")
    assert (err.value.line, err.value.column) == (1, 5)
    assert "end of input" in str(err.value)


def test_parse_error_on_second_line():
    with pytest.raises(ParseError) as err:
        parse("A x.\n  x in in")
    assert err.value.line == 2


@pytest.mark.parametrize("text", ["A in. in in x", "E A. A in x", "forall x. x in forall", "x in y z", "(x in y", "~"])
def test_rejects_bad_input(text):
    with pytest.raises(ParseError):
        parse(text)


def test_unicode_aliases():
    assert parse("∀x ∃y (y ∈ x ∧ ¬ x = y)") == parse("A x. E y. y in x & ~x = y")
    assert parse("x ≠ y") == Not(Equal("x", "y"))
    assert parse("x ∉ y") == parse("x notin y") == Not(Member("x", "y"))
    assert parse("x != y ↔ y ∈ x") == parse("~x = y <-> y in x")


def test_bounded_quantifier_sugar():
    assert parse("∀z∈x z = z") == parse("A z. z in x -> z = z")
    assert parse("∃a∈z a = a") == parse("E a. a in z & a = a")


def test_right_associative_connectives():
    assert parse("x in y & y in z & z in x") == And(
        Member("x", "y"), And(Member("y", "z"), Member("z", "x"))
    )
    assert parse("x in y -> y in z -> z in x") == Implies(
        Member("x", "y"), Implies(Member("y", "z"), Member("z", "x"))
    )


def test_quantifier_scope_is_maximal():
    f = parse("A x. x in y & y in x")
    assert isinstance(f, Forall) and isinstance(f.body, And)


def test_print_examples():
    assert print_formula(And(Member("a", "z"), Member("a", "y"))) == "a in z & a in y"
    b = parse(print_formula(catalog.get("B").formula))
    assert quantifier_count(b) == 0
    assert atom_count(b) == 9


@given(formulas)
def test_parse_print_identity(f):
    assert parse(print_formula(f)) == f
    assert parse(print_formula(f, unicode=True)) == f


@given(formulas)
def test_print_is_idempotent_canonicalization(f):
    text = print_formula(f)
    assert print_formula(parse(text)) == text


def test_round_trip_seeded_corpus():
    for f in random_formulas(seed=7, count=2000):
        assert parse(print_formula(f)) == f


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_round_trip(name):
    e = catalog.get(name)
    assert parse(e.official_rendering) == e.formula
    assert parse(print_formula(e.formula)) == e.formula


def test_token_convention():
    assert token_count("a∈z") == 3
    assert token_count("a ≠ z") == 4
    assert token_count("¬(a ∈ z)") == 6
    assert token_count("∀x (x ∈ y)") == 2 + 1 + 3 + 1
    assert token_count("∃y. y = y") == 2 + 3


def test_token_delta():
    assert catalog.token_count("AC**") == 87
    assert catalog.token_count("AC**-bar") == 71
    assert catalog.token_count("AC**") - catalog.token_count("AC**-bar") == 16


def test_catalog_token_count_rejects_unknown_rendering():
    with pytest.raises(catalog.UnknownNameError):
        catalog.token_count("a ∈ z")


def test_tokenize_positions():
    toks = tokenize("A x.\n x in y")
    assert [(t.kind, t.line, t.column) for t in toks][:3] == [("A", 1, 1), ("ident", 1, 3), (".", 1, 4)]


@given(st.text(alphabet="xy()&|~-><AE. in=", max_size=30))
def test_parser_fails_cleanly(text):
    try:
        parse(text)
    except ParseError:
        pass
