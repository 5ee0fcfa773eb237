"""HTTP surface through the FastAPI test client."""
import inspect

import numpy as np
import pytest
from fastapi.routing import APIRoute
from fastapi.testclient import TestClient

from povmorder.main import app

SMALL_BUDGET = {"samples": 300, "refine_steps": 0, "chunk_size": 100, "workers": 1, "seed": 3}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def ex3_doc(client):
    response = client.get("/api/examples/ex3")
    assert response.status_code == 200
    return response.json()


def test_health_and_info(client):
    health = client.get("/api/health").json()
    assert health["status"] == "healthy"

    info = client.get("/api/info").json()
    assert info["log_base"] in ("2", "e")
    assert info["tolerances"]["psd"] == pytest.approx(1e-9)


def test_validate_reports_instead_of_rejecting(client, ex3_doc):
    ok = client.post("/api/povm/validate", json=ex3_doc["povms"]["M"]).json()
    assert ok["valid"] is True

    doubled = dict(ex3_doc["povms"]["N"])
    doubled["elements"] = [doubled["elements"][0], doubled["elements"][0]]
    report = client.post("/api/povm/validate", json=doubled)
    assert report.status_code == 200
    assert report.json()["valid"] is False
    assert any(v["constraint"] == "sum" for v in report.json()["violations"])


def test_validate_reports_non_hermitian_element(client):
    skewed = {"dim": 2, "elements": [[[[1, 0], [0, 1]], [[0, 0], [0, 0]]], [[[0, 0], [0, -1]], [[0, 0], [1, 0]]]]}
    response = client.post("/api/povm/validate", json=skewed)
    assert response.status_code == 200
    body = response.json()
    assert body["valid"] is False
    assert [(v["constraint"], v["index"]) for v in body["violations"]] == [("hermitian", 0), ("hermitian", 1)]


def test_endpoints_run_in_the_threadpool():
    endpoints = [route.endpoint for route in app.routes if isinstance(route, APIRoute)]
    assert endpoints
    assert not any(inspect.iscoroutinefunction(endpoint) for endpoint in endpoints)


def test_validate_rejects_malformed_rational(client, ex3_doc):
    bad = dict(ex3_doc["povms"]["M"])
    bad["elements"] = [[[["3/0", 0], [0, 0]], [[0, 0], [0, 0]]]]
    assert client.post("/api/povm/validate", json=bad).status_code == 400


def test_canonical_form_flags(client, ex3_doc):
    body = client.post("/api/povm/canonical", json=ex3_doc["povms"]["N"]).json()
    assert body["projective"] is True
    assert body["linearly_independent"] is True
    assert sorted(atom["volume"] for atom in body["atoms"]) == pytest.approx([1.0, 1.0])


def test_observational_entropy_units(client, ex3_doc):
    payload = {"povm": ex3_doc["povms"]["M"], "rho": ex3_doc["states"]["rho0"]}
    bits = client.post("/api/entropy/observational", json=payload).json()
    assert bits["units"] == "bits"
    assert bits["value"] == pytest.approx(0.8112781244591328, abs=1e-10)

    nats = client.post("/api/entropy/observational", json={**payload, "log_base": "e"}).json()
    assert nats["units"] == "nats"
    assert nats["value"] == pytest.approx(bits["value"] * np.log(2), abs=1e-10)


def test_relative_entropy_infinite_value_is_a_string(client, ex3_doc):
    payload = {
        "povm": ex3_doc["povms"]["N"],
        "rho": ex3_doc["states"]["rho0"],
        "sigma": ex3_doc["states"]["rho1"],
    }
    body = client.post("/api/entropy/relative", json=payload).json()
    assert body["value"] == "inf"


def test_entropy_rejects_invalid_povm(client, ex3_doc):
    doubled = dict(ex3_doc["povms"]["N"])
    doubled["elements"] = [doubled["elements"][0], doubled["elements"][0]]
    payload = {"povm": doubled, "rho": ex3_doc["states"]["rho0"]}
    assert client.post("/api/entropy/observational", json=payload).status_code == 400


def test_classify_noisy_pair(client, ex3_doc):
    payload = {"n": ex3_doc["povms"]["N"], "m": ex3_doc["povms"]["M"], "budget": SMALL_BUDGET}
    response = client.post("/api/order/classify", json=payload)
    assert response.status_code == 200
    body = response.json()

    assert body["m_vs_n"]["stochastic"] is True
    assert body["m_vs_n"]["relent"]["status"] == "holds"
    assert body["n_vs_m"]["stochastic"] is False
    assert body["n_vs_m"]["entropy"]["status"] == "refuted"
    assert body["equivalence"] is False
    assert body["budget"]["seed"] == 3

    again = client.post("/api/order/classify", json=payload).json()
    assert again == body


def test_equivalence_maps(client, ex3_doc):
    n = ex3_doc["povms"]["N"]
    swapped = dict(n)
    swapped["elements"] = list(reversed(n["elements"]))
    body = client.post("/api/order/equivalence", json={"n": n, "m": swapped}).json()
    assert body["equivalent"] is True
    np.testing.assert_allclose(body["m_to_n"], [[0, 1], [1, 0]], atol=1e-8)

    body = client.post("/api/order/equivalence", json={"n": n, "m": ex3_doc["povms"]["M"]}).json()
    assert body == {"equivalent": False, "m_to_n": None, "n_to_m": None}


def test_construct_eps_mix_defaults_to_basis(client, ex3_doc):
    body = client.post("/api/construct/eps-mix", json={"eps": 0.25}).json()
    m = body["povms"]["M"]
    expected = ex3_doc["povms"]["M"]
    assert m["dim"] == 2
    np.testing.assert_allclose(np.array(m["elements"], dtype=float)[0, 0, 0, 0], 0.75)
    assert len(m["elements"]) == len(expected["elements"])


def test_construct_eps_mix_out_of_range(client):
    assert client.post("/api/construct/eps-mix", json={"eps": 0.6}).status_code == 422


def test_construct_n_lambda_with_separation(client, ex3_doc):
    payload = {"n": ex3_doc["povms"]["N"], "lam": 0.015625, "m": ex3_doc["povms"]["M"]}
    body = client.post("/api/construct/n-lambda", json=payload).json()
    assert body["povms"]["N_lambda"]["labels"] == ["n:0", "n:1", "id:1"]
    assert body["separation"]["lambda_prime"] == pytest.approx(0.0, abs=1e-9)
    assert body["separation"]["lambda_double_prime"] == pytest.approx(1 / 64)


def test_examples_listing_and_missing(client):
    assert client.get("/api/examples").json() == ["ex3", "ex4", "prop1_counter"]
    assert client.get("/api/examples/nope").status_code == 404


@pytest.mark.slow
def test_reproduce_report_passes(client):
    body = client.get("/api/reproduce").json()
    assert body["passed"] is True
    assert body["checks"]
