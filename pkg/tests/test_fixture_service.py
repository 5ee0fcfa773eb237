import math

import pytest

from povmorder.exceptions import SchemaError, UnknownFixtureError
from povmorder.services import FixtureService


def test_registry_lists_bundled_examples(fixtures):
    assert fixtures.list_fixtures() == ["ex3", "ex4", "prop1_counter"]


def test_unknown_fixture(fixtures):
    with pytest.raises(UnknownFixtureError) as info:
        fixtures.get("ex9")
    assert "ex3" in str(info.value)


def test_fixture_bundle_contents(ex3, counter):
    assert ex3.name == "ex3"
    assert sorted(ex3.povms) == ["M", "N", "N_lambda"]
    assert sorted(ex3.states) == ["rho0", "rho1"]
    assert ex3.povms["N_lambda"].elements[0, 0, 0] == 1 / 64
    assert counter.states == {}


def test_get_is_cached(fixtures):
    assert fixtures.get("ex4") is fixtures.get("ex4")


def test_reproduce_all_examples(fixtures, budget):
    report = fixtures.reproduce(budget=budget)
    assert report.passed, report.to_markdown()
    assert report.tolerance == pytest.approx(1e-9)
    keys = {(check.fixture, check.key) for check in report.checks}
    assert ("ex3", "S_N_lambda(rho0)") in keys
    assert ("ex4", "N_lambda rel M") in keys
    infinite = next(c for c in report.checks if c.fixture == "ex3" and c.key == "D_N(rho0||rho1)")
    assert infinite.expected == math.inf and infinite.difference == 0.0


def test_reproduce_selected_names(fixtures, budget):
    report = fixtures.reproduce(names=["prop1_counter"], budget=budget)
    assert {check.fixture for check in report.checks} == {"prop1_counter"}
    assert report.passed


def test_wrong_closed_form_is_reported(fixtures, budget):
    fixture = fixtures.get("ex3")
    values = [value.model_copy(deep=True) for value in fixture.expected_values]
    values[0].closed_form.terms[0].coef = "1/2"
    broken = fixture.model_copy(update={"expected_values": values, "expected_relations": []})
    checks = fixtures.reproduce_fixture(broken, 1e-9, budget)
    assert not checks[0].passed
    assert checks[0].difference == pytest.approx(0.5)
    assert all(check.passed for check in checks[1:])


def test_wrong_relation_is_reported(fixtures, budget):
    fixture = fixtures.get("ex3")
    relations = [relation.model_copy() for relation in fixture.expected_relations]
    flipped = next(r for r in relations if r.key == "M post N")
    relations[relations.index(flipped)] = flipped.model_copy(update={"holds": False})
    broken = fixture.model_copy(update={"expected_values": [], "expected_relations": relations})
    checks = fixtures.reproduce_fixture(broken, 1e-9, budget)
    failed = [check.key for check in checks if not check.passed]
    assert failed == ["M post N"]


def test_malformed_fixture_file(tmp_path):
    (tmp_path / "bad.json").write_text('{"name": "bad"}')
    service = FixtureService(fixtures_dir=tmp_path)
    assert service.list_fixtures() == ["bad"]
    with pytest.raises(SchemaError):
        service.get("bad")
