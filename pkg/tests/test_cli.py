import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from povmorder.cli import EXIT_FAILURE, EXIT_IO, EXIT_OK, main
from povmorder.models import Povm

FAST = ["--samples", "300", "--budget-refine", "0", "--seed", "5"]


@pytest.fixture
def files(tmp_path, storage, ex3):
    storage.save_bundle({**ex3.povms, **ex3.states}, ".")
    storage.save_povm(Povm(np.stack([np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])), "bad.json")
    (tmp_path / "skewed.json").write_text(
        json.dumps({"dim": 2, "elements": [[[[1, 0], [0.5, 0]], [[0, 0], [0, 0]]], [[[0, 0], [-0.5, 0]], [[0, 0], [1, 0]]]]})
    )
    (tmp_path / "broken.json").write_text("[1, 2")
    (tmp_path / "notpovm.json").write_text('{"dim": 2}')
    return tmp_path


def test_validate(files, capsys):
    assert main(["validate", str(files / "M.json")]) == EXIT_OK
    out = capsys.readouterr()
    assert out.out.strip() == "valid"
    assert "# seed=" in out.err


def test_validate_reports_violations(files, capsys):
    assert main(["validate", str(files / "bad.json")]) == EXIT_FAILURE
    assert "invalid: sum" in capsys.readouterr().out


def test_validate_reports_non_hermitian_elements(files, capsys):
    assert main(["validate", str(files / "skewed.json")]) == EXIT_FAILURE
    out = capsys.readouterr().out
    assert "invalid: hermitian[0]" in out
    assert "invalid: hermitian[1]" in out


@pytest.mark.parametrize("name", ["missing.json", "broken.json", "notpovm.json"])
def test_io_and_parse_errors(files, capsys, name):
    assert main(["validate", str(files / name)]) == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_observational_entropy(files, capsys):
    assert main(["entropy", str(files / "M.json"), str(files / "rho0.json")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.811278 bits"
    assert main(["entropy", str(files / "M.json"), str(files / "rho0.json"), "--log-base", "e"]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith(" nats")


def test_relative_entropy(files, capsys):
    args = ["entropy", str(files / "N.json"), str(files / "rho0.json"), "--sigma", str(files / "rho1.json")]
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out.strip() == "inf"
    assert main(args + ["--json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["result"]["value"] == "inf"
    assert document["config"]["log_base"] == "2"


def test_entropy_refuses_invalid_povm(files, capsys):
    assert main(["entropy", str(files / "bad.json"), str(files / "rho0.json")]) == EXIT_FAILURE


def test_tol_psd_override_reaches_state_checks(files, capsys):
    # eigenvalue -1e-8: outside the default slack, inside --tol-psd 1e-6
    state = {"dim": 2, "matrix": [[[1.00000001, 0], [0, 0]], [[0, 0], [-1e-8, 0]]]}
    (files / "rough.json").write_text(json.dumps(state))
    args = ["entropy", str(files / "M.json"), str(files / "rough.json")]

    assert main(args) == EXIT_FAILURE
    assert "negative eigenvalue" in capsys.readouterr().err

    assert main(args + ["--tol-psd", "1e-6"]) == EXIT_OK
    assert capsys.readouterr().out.strip().startswith("0.81127")


def test_classify_json(files, capsys):
    args = ["classify", str(files / "N.json"), str(files / "M.json"), "--json"] + FAST
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    classification = json.loads(first)["classification"]
    assert classification["n_vs_m"]["linear"] is True
    assert classification["n_vs_m"]["stochastic"] is False
    assert classification["n_vs_m"]["entropy"]["status"] == "refuted"
    assert classification["m_vs_n"]["relent"]["status"] == "holds"
    assert classification["equivalence"] is False

    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == first


def test_classify_human(files, capsys):
    assert main(["classify", str(files / "N_lambda.json"), str(files / "M.json")] + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert "entropy:    holds (identity-mixing)" in out
    assert "equivalence: no" in out


def test_construct_eps_mix(files, capsys, storage, ex3):
    out = files / "mix"
    assert main(["construct", "eps-mix", "--eps", "0.25", "--out", str(out)]) == EXIT_OK
    assert "wrote" in capsys.readouterr().out
    assert_allclose(storage.load_povm(out / "M.json").elements, ex3.povms["M"].elements, atol=1e-15)
    assert json.loads((out / "pair.json").read_text())["alpha_is_stochastic"] is False
    assert main(["validate", str(out / "N.json")]) == EXIT_OK


def test_construct_eps_mix_rejects_bad_eps(files, capsys):
    assert main(["construct", "eps-mix", "--eps", "0.6", "--out", str(files / "x")]) == EXIT_FAILURE


def test_construct_n_lambda_with_separation(files, capsys, storage, ex3):
    out = files / "nl"
    args = [
        "construct", "n-lambda", "--povm", str(files / "N.json"), "--lambda", "0.015625",
        "--finer", str(files / "M.json"), "--out", str(out), "--json",
    ]
    assert main(args) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["separation"]["lambda_double_prime"] == pytest.approx(1 / 64)
    assert_allclose(storage.load_povm(out / "N_lambda.json").elements, ex3.povms["N_lambda"].elements)


def test_construct_postprocess(files, capsys, storage):
    (files / "map.json").write_text(json.dumps({"matrix": [[0.75, 0.25], [0.25, 0.75]]}))
    out = files / "pp"
    args = ["construct", "postprocess", "--povm", str(files / "N.json"), "--map", str(files / "map.json")]
    assert main(args + ["--out", str(out)]) == EXIT_OK
    assert_allclose(storage.load_povm(out / "N.json").elements[0], np.diag([0.75, 0.25]))


def test_construct_example(files, capsys):
    out = files / "ex"
    assert main(["construct", "example", "ex4", "--out", str(out)]) == EXIT_OK
    assert {p.name for p in out.iterdir()} >= {"N.json", "M.json", "N_lambda.json", "rho0.json", "fixture.json"}
    assert main(["construct", "example", "nope", "--out", str(out)]) == EXIT_FAILURE


def test_reproduce(capsys):
    assert main(["reproduce"] + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# Reproduction report")
    assert "MISMATCH" not in out


def test_reproduce_json(capsys):
    assert main(["reproduce", "--json"] + FAST) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["report"]["passed"] is True
    assert document["config"]["seed"] == 5


def test_reproduce_reports_mismatches_under_tight_tolerance(capsys):
    assert main(["reproduce", "--json", "--tolerance", "1e-30"] + FAST) == EXIT_FAILURE
    out = capsys.readouterr()
    report = json.loads(out.out)["report"]
    assert report["passed"] is False
    assert report["tolerance"] == 1e-30

    failing = [check for check in report["checks"] if not check["passed"]]
    assert failing
    assert all(check["kind"] == "value" for check in failing)
    for check in failing:
        assert f"MISMATCH {check['fixture']}/{check['key']}" in out.err
