import json

import jsonschema
import pytest

from memlogic.suite import REPORT_SCHEMA, recheck_report, recheck_witness, verify_paper

FAST = dict(nmax=2, rank=3, count=300)


def _strip_times(text):
    data = json.loads(text)
    for c in data["checks"]:
        c["millis"] = 0
    return data


@pytest.fixture(scope="module")
def fast_run():
    return verify_paper(**FAST)


def test_nmax_2_all_pass(fast_run):
    assert fast_run.complete
    assert [c.check for c in fast_run.checks if not c.passed] == []


def test_report_is_schema_valid_and_round_trips(fast_run):
    text = fast_run.dumps()
    data = json.loads(text)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert json.dumps(data, indent=2, ensure_ascii=False) + "\n" == text


def test_reruns_identical_apart_from_times(fast_run):
    again = verify_paper(**FAST)
    assert _strip_times(again.dumps()) == _strip_times(fast_run.dumps())


def test_order_is_fixed(fast_run):
    names = [c.check for c in fast_run.checks]
    assert names[0] == "quantifier-counts"
    assert names[-1] == "catalog-consistency"
    assert len(names) == len(set(names)) == 20


def test_preconditions():
    with pytest.raises(ValueError):
        verify_paper(nmax=1)
    with pytest.raises(ValueError):
        verify_paper(rank=2)


def test_budget_exhaustion_is_incomplete():
    r = verify_paper(budget=0, **FAST)
    assert not r.complete and not r.passed
    assert r.to_json()["status"] == "fail"


@pytest.mark.parametrize("fault", ["flip-quantifier", "drop-conjunct", "wrong-patch"])
def test_faults_fail_with_rechecked_witnesses(fault):
    r = verify_paper(faults={fault}, **FAST)
    failed = [c for c in r.checks if not c.passed]
    assert failed
    for c in failed:
        assert c.witness
    assert all(recheck_report(c, r.params) for c in failed)
    jsonschema.validate(r.to_json(), REPORT_SCHEMA)


def test_faults_at_nmax_3_give_structural_witnesses():
    r = verify_paper(nmax=3, rank=3, count=50, faults={"drop-conjunct"},
                     only={"AC*-equiv-AC**", "derivation"})
    first = r.checks[0]
    assert first.check == "AC*-equiv-AC**" and not first.passed
    assert first.witness["domain_size"] == 3
    assert recheck_witness(first.witness)


def test_only_runs_named_checks():
    r = verify_paper(only={"bridge", "token-delta"}, **FAST)
    assert [c.check for c in r.checks] == ["token-delta", "bridge"]


def test_fake_witness_is_not_confirmed():
    w = {"domain_size": 1, "membership": [], "assignment": {}, "formula": "A x. x = x"}
    assert not recheck_witness(w)
