"""Services package."""

from .operator_service import operator_service, OperatorService, create_operator_service
from .povm_service import povm_service, PovmService, create_povm_service
from .entropy_service import entropy_service, EntropyService, create_entropy_service
from .search_service import search_service, SearchService, SearchJob, SearchKind, create_search_service
from .order_service import order_service, OrderService, StochasticDecision, create_order_service
from .construct_service import construct_service, ConstructService, create_construct_service
from .storage_service import storage_service, LocalStorageService, StorageInterface, create_storage_service
from .fixture_service import fixture_service, FixtureService, FixtureBundle, create_fixture_service

__all__ = [
    "operator_service",
    "OperatorService",
    "create_operator_service",
    "povm_service",
    "PovmService",
    "create_povm_service",
    "entropy_service",
    "EntropyService",
    "create_entropy_service",
    "search_service",
    "SearchService",
    "SearchJob",
    "SearchKind",
    "create_search_service",
    "order_service",
    "OrderService",
    "StochasticDecision",
    "create_order_service",
    "construct_service",
    "ConstructService",
    "create_construct_service",
    "storage_service",
    "LocalStorageService",
    "StorageInterface",
    "create_storage_service",
    "fixture_service",
    "FixtureService",
    "FixtureBundle",
    "create_fixture_service",
]
