import copy

import pytest

from htd import HTDError
from htd.reproduce import ORIGINS, TARGETS, load_fixtures, reproduce, validate_fixtures

FIXTURES = load_fixtures()


@pytest.mark.parametrize("target", list(TARGETS))
def test_target_reproduces(target):
    rep = reproduce(target, FIXTURES)
    failed = [r for r in rep.rows if not r.passed]
    assert not failed, [(r.name, r.expected, r.actual) for r in failed]


def test_every_target_has_fixtures():
    assert set(FIXTURES["fixtures"]) == set(TARGETS)


def test_every_check_carries_provenance():
    for fx in FIXTURES["fixtures"].values():
        for chk in fx["checks"]:
            assert chk["origin"] in ORIGINS
            assert chk["source"].strip()
            assert float(chk["tolerance"]) >= 0


@pytest.mark.parametrize("field", ["origin", "source", "tolerance"])
def test_missing_provenance_rejected(field):
    data = copy.deepcopy(FIXTURES)
    del data["fixtures"]["ex4.1"]["checks"][0][field]
    with pytest.raises(HTDError) as err:
        validate_fixtures(data)
    assert err.value.code == "FIXTURE_PROVENANCE"


def test_unknown_origin_rejected():
    data = copy.deepcopy(FIXTURES)
    data["fixtures"]["ex3.1"]["checks"][0]["origin"] = "guess"
    with pytest.raises(HTDError):
        validate_fixtures(data)


def test_tampered_value_fails():
    data = copy.deepcopy(FIXTURES)
    chk = next(c for c in data["fixtures"]["ex4.1"]["checks"] if c["kind"] == "value")
    chk["expected"] = float(chk["expected"]) + 1e-3
    assert not reproduce("ex4.1", data).passed


def test_unknown_target():
    with pytest.raises(HTDError):
        reproduce("nope")
