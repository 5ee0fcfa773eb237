import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from povmorder.config import active_tolerances, settings, use_tolerances
from povmorder.exceptions import (
    InvalidStateError,
    InvalidStochasticMapError,
    NonHermitianError,
    SchemaError,
    ShapeMismatchError,
)
from povmorder.models import (
    Certificate,
    CertificateKind,
    ClosedForm,
    DensityMatrix,
    HermitianOperator,
    LinearRelation,
    LogTerm,
    OrderRelation,
    OrderVerdict,
    Povm,
    PovmSchema,
    ReproductionCheck,
    ReproductionReport,
    SearchBudget,
    SeparationParameters,
    StateSchema,
    StochasticMap,
    TracelessHermitian,
    VerdictStatus,
    Witness,
)
from povmorder.models.schemas import decode_matrix, parse_scalar
from tests.conftest import BITS, NATS, SIGMA_Z


def test_hermitian_operator_is_read_only():
    op = HermitianOperator(SIGMA_Z)
    assert op.dim == 2
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5.0


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_scoped_tolerances_apply_to_model_checks():
    rough = np.diag([1.0 + 1e-8, -1e-8])
    with pytest.raises(InvalidStateError):
        DensityMatrix(rough)

    loose = settings.tolerances().with_overrides(psd=1e-6, herm=1e-6, stoch=1e-6)
    with use_tolerances(loose):
        assert active_tolerances().psd == 1e-6
        assert DensityMatrix(rough).dim == 2
        Povm(np.stack([np.diag([1.0, 0.0]), np.array([[0.0, 1e-7], [0.0, 1.0]])]))
        StochasticMap(np.array([[1.0, -1e-7], [0.0, 1.0 + 1e-7]]))

    assert active_tolerances() == settings.tolerances()
    with pytest.raises(InvalidStateError):
        DensityMatrix(rough)


def test_scalar_is_one_by_one():
    assert HermitianOperator(np.array(3.0)).dim == 1


def test_density_matrix_checks():
    assert DensityMatrix.maximally_mixed(3).trace == pytest.approx(1.0)
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.5, -0.5]))
    assert_allclose(DensityMatrix.pure(np.array([2.0, 0.0])).matrix, np.diag([1.0, 0.0]))


def test_traceless_direction():
    assert TracelessHermitian(SIGMA_Z).trace == 0.0
    with pytest.raises(InvalidStateError):
        TracelessHermitian(np.eye(2))


def test_povm_defaults_and_shapes():
    m = Povm(np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    assert m.labels == ("0", "1")
    assert (m.dim, m.count, len(m)) == (2, 2, 2)
    assert_allclose(m.volumes, [1.0, 1.0])
    assert_allclose(m.total(), np.eye(2))
    assert Povm(np.eye(2)).count == 1
    with pytest.raises(ShapeMismatchError):
        Povm(np.eye(2)[np.newaxis], ("a", "b"))
    with pytest.raises(ShapeMismatchError):
        Povm(np.zeros((0, 2, 2)))
    with pytest.raises(ShapeMismatchError):
        Povm.from_operators([np.eye(2), np.eye(3)])


def test_invalid_povm_can_be_built():
    m = Povm(np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 0.5])]))
    assert m.count == 2


@pytest.mark.parametrize(
    "value, expected", [(0.25, 0.25), (3, 3.0), ("3/4", 0.75), ("-1", -1.0), (" 1/3 ", 1 / 3)]
)
def test_parse_scalar(value, expected):
    assert parse_scalar(value) == pytest.approx(expected)


@pytest.mark.parametrize("value", ["abc", "1/0"])
def test_parse_scalar_rejects(value):
    with pytest.raises(SchemaError):
        parse_scalar(value)


def test_decode_matrix_rejects_bad_shapes():
    with pytest.raises(SchemaError):
        decode_matrix([[[1, 0]]], 2)
    with pytest.raises(SchemaError):
        decode_matrix([[[1, 0, 0]]], 1)


def test_povm_schema_with_rationals():
    doc = {
        "dim": 2,
        "elements": [
            [[["3/4", 0], [0, 0]], [[0, 0], ["1/4", 0]]],
            [[["1/4", 0], [0, 0]], [[0, 0], ["3/4", 0]]],
        ],
        "labels": ["a", "b"],
    }
    povm = PovmSchema.model_validate(doc).to_povm()
    assert povm.labels == ("a", "b")
    assert_allclose(povm.elements[0], np.diag([0.75, 0.25]))
    again = PovmSchema.model_validate(json.loads(PovmSchema.from_povm(povm).model_dump_json())).to_povm()
    assert_allclose(again.elements, povm.elements)


def test_povm_schema_label_count_mismatch():
    schema = PovmSchema(dim=1, elements=[[[[1, 0]]]], labels=["a", "b"])
    with pytest.raises(SchemaError):
        schema.to_povm()


def test_povm_schema_requires_elements():
    with pytest.raises(ValidationError):
        PovmSchema(dim=2, elements=[])


def test_state_schema_from_matrix():
    state = StateSchema.from_matrix(DensityMatrix.maximally_mixed(2))
    assert state.dim == 2
    assert_allclose(state.to_density().matrix, np.eye(2) / 2)


def test_entropy_config_units():
    assert BITS.units == "bits"
    assert NATS.units == "nats"
    assert NATS.unit_constant == 1.0
    assert BITS.unit_constant == pytest.approx(1.0 / math.log(2.0))


def test_linear_relation_norm_and_stochasticity():
    relation = LinearRelation(np.array([[0.5, -0.5], [0.5, 1.5]]))
    assert relation.entry_l1_norm == pytest.approx(3.0)
    assert not relation.is_stochastic
    assert LinearRelation(np.eye(2)).is_stochastic
    with pytest.raises(ShapeMismatchError):
        LinearRelation(np.ones(3))


def test_stochastic_map_checks():
    assert StochasticMap.binary_flip(0.2).shape == (2, 2)
    assert StochasticMap.merge_all(3).shape == (1, 3)
    assert_allclose(StochasticMap.identity(2).matrix, np.eye(2))
    with pytest.raises(InvalidStochasticMapError):
        StochasticMap(np.array([[1.2, 0.0], [-0.2, 1.0]]))
    with pytest.raises(InvalidStochasticMapError):
        StochasticMap(np.array([[0.5, 0.5], [0.4, 0.5]]))


def test_verdict_needs_evidence():
    with pytest.raises(ValidationError):
        OrderVerdict(relation=OrderRelation.ENTROPY, status=VerdictStatus.HOLDS)
    with pytest.raises(ValidationError):
        OrderVerdict(relation=OrderRelation.RELENT, status=VerdictStatus.REFUTED)

    shortcut = OrderVerdict(
        relation=OrderRelation.ENTROPY, status=VerdictStatus.REFUTED, reason="projective-shortcut"
    )
    assert shortcut.refuted
    assert shortcut.label() == "refuted (projective-shortcut)"

    held = OrderVerdict(
        relation=OrderRelation.ENTROPY,
        status=VerdictStatus.HOLDS,
        certificate=Certificate(kind=CertificateKind.STOCHASTIC_MAP, stochastic_map=[[1.0]]),
    )
    assert held.holds
    assert held.label() == "holds (stochastic-map)"
    assert OrderVerdict(relation=OrderRelation.RELENT, status=VerdictStatus.UNKNOWN).label() == "unknown"


def test_witness_serializes_infinite_margin():
    witness = Witness(rho=StateSchema.from_matrix(np.eye(2) / 2), margin=math.inf)
    assert witness.model_dump(mode="json")["margin"] == "inf"


def test_search_budget_bounds():
    with pytest.raises(ValidationError):
        SearchBudget(samples=-1)
    with pytest.raises(ValidationError):
        SearchBudget(workers=0)


def test_separation_parameters_ranges():
    params = SeparationParameters(
        dim=2, alpha_norm=4.0, beta=0.5, vol_min=0.5, lambda_prime=0.1, lambda_double_prime=0.05
    )
    assert params.lambda_prime == 0.1
    with pytest.raises(ValidationError):
        SeparationParameters(
            dim=2, alpha_norm=4.0, beta=0.5, vol_min=0.5, lambda_prime=0.7, lambda_double_prime=0.05
        )


def test_closed_form_evaluation():
    form = ClosedForm(terms=[LogTerm(coef="1"), LogTerm(coef="-1/4", log2="3")])
    assert form.evaluate() == pytest.approx(1.0 - 0.25 * math.log2(3))
    assert ClosedForm(infinite=True).evaluate() == math.inf


def test_reproduction_report_markdown():
    report = ReproductionReport(
        tolerance=1e-9,
        checks=[
            ReproductionCheck(
                fixture="f", key="a", kind="value", expected=1.0, computed=1.0, difference=0.0,
                passed=True, provenance="p",
            ),
            ReproductionCheck(
                fixture="f", key="b", kind="relation", expected=True, computed=False, passed=False, provenance="p",
            ),
        ],
    )
    assert not report.passed
    assert [check.key for check in report.failures()] == ["b"]
    text = report.to_markdown()
    assert "| f | a | 1.000000 | 1.000000 | ok |" in text
    assert "MISMATCH" in text
    assert text.endswith("1/2 checks passed")


def test_reproduction_check_serializes_infinity():
    check = ReproductionCheck(
        fixture="f", key="k", kind="value", expected=math.inf, computed=math.inf, difference=0.0,
        passed=True, provenance="p",
    )
    dumped = check.model_dump(mode="json")
    assert dumped["expected"] == "inf"
    assert dumped["computed"] == "inf"
