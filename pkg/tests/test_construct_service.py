import numpy as np
import pytest
from numpy.testing import assert_allclose

from povmorder.exceptions import (
    InvalidParameterError,
    LinearlyDependentError,
    NoLinearRelationError,
    ShapeMismatchError,
    SingularMapError,
)
from povmorder.models import HermitianOperator, StochasticMap
from tests.conftest import plus_minus_basis

KET0 = HermitianOperator(np.diag([1.0, 0.0]))
KET1 = HermitianOperator(np.diag([0.0, 1.0]))


def test_postprocess_merges_outcomes(construct, qubit_basis, povms):
    merged = construct.postprocess(qubit_basis, StochasticMap.merge_all(2))
    assert merged.count == 1
    assert_allclose(merged.elements[0], np.eye(2))
    with pytest.raises(ShapeMismatchError):
        construct.postprocess(qubit_basis, StochasticMap.merge_all(3))


def test_binary_epsilon_mix_reproduces_noisy_measurement(construct, ex3):
    pair = construct.binary_epsilon_mix(KET0, KET1, 0.25)
    assert_allclose(pair.m.elements, ex3.povms["M"].elements, atol=1e-12)
    assert_allclose(pair.alpha.alpha, [[1.5, -0.5], [-0.5, 1.5]], atol=1e-12)
    assert pair.alpha.entry_l1_norm == pytest.approx(4.0)
    assert not pair.alpha_is_stochastic
    assert pair.eps == 0.25
    assert pair.alpha.max_residual <= 1e-12
    assert pair.to_dict()["lambda_map"]["matrix"] == [[0.75, 0.25], [0.25, 0.75]]


@pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, 0.7])
def test_binary_epsilon_mix_rejects_eps(construct, eps):
    with pytest.raises(InvalidParameterError):
        construct.binary_epsilon_mix(KET0, KET1, eps)


def test_invertible_pair_preconditions(construct, qubit_basis, povms):
    with pytest.raises(SingularMapError):
        construct.invertible_stochastic_pair(qubit_basis, StochasticMap(np.full((2, 2), 0.5)))
    with pytest.raises(ShapeMismatchError):
        construct.invertible_stochastic_pair(qubit_basis, StochasticMap.merge_all(2))
    dependent = povms.disjoint_convex(0.5, qubit_basis, plus_minus_basis())
    with pytest.raises(LinearlyDependentError):
        construct.invertible_stochastic_pair(dependent, StochasticMap.identity(4))


def test_invertible_pair_with_permutation_is_stochastic(construct, qubit_basis):
    pair = construct.invertible_stochastic_pair(qubit_basis, StochasticMap(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert pair.alpha_is_stochastic


def test_separation_parameters_sharp_pair(construct, ex3):
    params = construct.separation_parameters(ex3.povms["N"], ex3.povms["M"])
    assert params.alpha_norm == pytest.approx(4.0)
    assert params.beta == pytest.approx(0.0)
    assert params.vol_min == pytest.approx(1.0)
    assert params.lambda_prime == pytest.approx(0.0)
    assert params.lambda_double_prime == pytest.approx(1 / 64)


def test_separation_parameters_noisy_pair(construct, ex4):
    params = construct.separation_parameters(ex4.povms["N"], ex4.povms["M"])
    assert params.beta == pytest.approx(0.25)
    assert params.lambda_prime == pytest.approx(1 / 128)
    assert params.lambda_double_prime == pytest.approx(1 / 64)
    assert params.alpha_norm >= 1.0


def test_separation_parameters_preconditions(construct, qubit_basis, counter):
    with pytest.raises(NoLinearRelationError):
        construct.separation_parameters(plus_minus_basis(), qubit_basis)
    with pytest.raises(LinearlyDependentError):
        construct.separation_parameters(counter.povms["P"], counter.povms["M"])


def test_build_n_lambda_matches_fixture(construct, ex3, ex4):
    built = construct.build_n_lambda(ex3.povms["N"], 1 / 64)
    assert built.labels == ex3.povms["N_lambda"].labels
    assert_allclose(built.elements, ex3.povms["N_lambda"].elements, atol=1e-15)
    assert_allclose(construct.build_n_lambda(ex4.povms["N"], 1 / 128).elements, ex4.povms["N_lambda"].elements)


def test_full_weight_mixing_pads_zero_elements(povms, qubit_basis):
    padded = povms.disjoint_convex(1.0, qubit_basis, povms.trivial(2))
    assert padded.count == 3
    assert_allclose(padded.elements[:2], qubit_basis.elements)
    assert_allclose(padded.elements[2], np.zeros((2, 2)))


@pytest.mark.parametrize("dim, count", [(1, 1), (2, 3), (3, 5), (4, 2)])
def test_random_povm_is_valid(construct, povms, dim, count):
    m = construct.random_povm(dim, count, seed=dim * count)
    assert m.count == count
    assert povms.validate(m).valid
    with pytest.raises(InvalidParameterError):
        construct.random_povm(dim, 0)


def test_random_projective_povm(construct, povms):
    p = construct.random_projective_povm(4, seed=3, ranks=[1, 3])
    assert povms.is_projective(p)
    assert_allclose(p.volumes, [1.0, 3.0])
    assert povms.is_projective(construct.random_projective_povm(3, seed=1))
    with pytest.raises(InvalidParameterError):
        construct.random_projective_povm(3, ranks=[1, 1])


def test_random_stochastic_map_columns(construct):
    lam = construct.random_stochastic_map(3, 5, seed=2)
    assert lam.shape == (3, 5)
    assert_allclose(lam.matrix.sum(axis=0), 1.0)


def test_variants(construct, orders, povms):
    m = construct.random_povm(2, 3, seed=9)
    assert orders.decide_equivalence(m, construct.equivalent_variant(m, seed=1))
    blended = construct.perturbed_variant(m, seed=1)
    assert povms.validate(blended).valid
    assert orders.decide_stochastic(blended, m).feasible
    assert not orders.decide_equivalence(blended, m)
    with pytest.raises(InvalidParameterError):
        construct.perturbed_variant(m, strength=0.6)
    with pytest.raises(InvalidParameterError):
        construct.perturbed_variant(povms.trivial(2))
