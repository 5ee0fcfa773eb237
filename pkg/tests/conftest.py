"""Shared fixtures: service instances, small search budgets and the example bundles."""
import numpy as np
import pytest

from povmorder.config import settings
from povmorder.models import DensityMatrix, EntropyConfig, LogBase, Povm, SearchBudget
from povmorder.services import (
    create_construct_service,
    create_entropy_service,
    create_fixture_service,
    create_operator_service,
    create_order_service,
    create_povm_service,
    create_search_service,
    create_storage_service,
)

BITS = EntropyConfig(log_base=LogBase.BITS)
NATS = EntropyConfig(log_base=LogBase.NATS)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ket(dim: int, k: int) -> DensityMatrix:
    vector = np.zeros(dim)
    vector[k] = 1.0
    return DensityMatrix.pure(vector)


def plus_minus_basis() -> Povm:
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    return Povm(np.stack([np.outer(plus, plus), np.outer(minus, minus)]))


@pytest.fixture(scope="session")
def tol():
    return settings.tolerances()


@pytest.fixture(scope="session")
def operators(tol):
    return create_operator_service(tol)


@pytest.fixture(scope="session")
def povms(tol, operators):
    return create_povm_service(tol, operators)


@pytest.fixture(scope="session")
def entropies(tol, povms):
    return create_entropy_service(tol, povms, BITS)


@pytest.fixture(scope="session")
def orders(tol, entropies):
    return create_order_service(tol, create_search_service(tol, entropies))


@pytest.fixture(scope="session")
def search(orders):
    return orders.search


@pytest.fixture(scope="session")
def construct(tol, orders):
    return create_construct_service(tol, orders)


@pytest.fixture(scope="session")
def fixtures(orders):
    return create_fixture_service(orders=orders)


@pytest.fixture
def storage(tmp_path):
    return create_storage_service(tmp_path)


@pytest.fixture
def budget():
    return SearchBudget(samples=600, refine_steps=10, chunk_size=200, workers=1, seed=0)


@pytest.fixture(scope="session")
def ex3(fixtures):
    return fixtures.example_fixture("ex3")


@pytest.fixture(scope="session")
def ex4(fixtures):
    return fixtures.example_fixture("ex4")


@pytest.fixture(scope="session")
def counter(fixtures):
    return fixtures.example_fixture("prop1_counter")


@pytest.fixture(scope="session")
def qubit_basis(povms):
    return povms.computational_basis(2)
