"""
Fixture Service - versioned registry of worked examples and the reproduction runner.
Thread-safe, with an in-memory cache of parsed fixtures.
"""
import logging
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from povmorder.config import settings
from povmorder.exceptions import SchemaError, UnknownFixtureError
from povmorder.models import (
    DensityMatrix,
    EntropyConfig,
    ExampleFixture,
    ExpectedRelation,
    ExpectedValue,
    LogBase,
    OrderRelation,
    Povm,
    ReproductionCheck,
    ReproductionReport,
    SearchBudget,
    VerdictStatus,
)
from povmorder.services.order_service import OrderService, create_order_service
from povmorder.services.storage_service import LocalStorageService, create_storage_service

logger = logging.getLogger(__name__)

BITS = EntropyConfig(log_base=LogBase.BITS)


@dataclass
class FixtureBundle:
    """A parsed fixture with its POVMs and states rendered to doubles."""

    fixture: ExampleFixture
    povms: Dict[str, Povm]
    states: Dict[str, DensityMatrix]

    @property
    def name(self) -> str:
        return self.fixture.name


class FixtureService:
    """Registry over `<fixtures_dir>/*.json`."""

    def __init__(
        self,
        fixtures_dir: Optional[Path] = None,
        orders: Optional[OrderService] = None,
        storage: Optional[LocalStorageService] = None,
    ):
        self.fixtures_dir = fixtures_dir or settings.FIXTURES_DIR
        self.orders = orders or create_order_service()
        self.storage = storage or create_storage_service(self.fixtures_dir)
        self._lock = threading.Lock()
        self._cache: Dict[str, ExampleFixture] = {}

    def list_fixtures(self) -> List[str]:
        return sorted(path.stem for path in self.fixtures_dir.glob("*.json"))

    def get(self, name: str) -> ExampleFixture:
        with self._lock:
            if name in self._cache:
                return self._cache[name]
            if name not in self.list_fixtures():
                raise UnknownFixtureError(
                    f"Unknown example {name!r}; available: {', '.join(self.list_fixtures())}"
                )
            try:
                fixture = ExampleFixture.model_validate(self.storage.read_json(f"{name}.json"))
            except ValidationError as e:
                raise SchemaError(f"Fixture {name} is malformed: {e}")
            self._cache[name] = fixture
            return fixture

    def example_fixture(self, name: str) -> FixtureBundle:
        """Exact-entried POVMs, states and expected values of a named example."""
        fixture = self.get(name)
        return self.bundle(fixture)

    @staticmethod
    def bundle(fixture: ExampleFixture) -> FixtureBundle:
        return FixtureBundle(
            fixture=fixture,
            povms={key: schema.to_povm() for key, schema in fixture.povms.items()},
            states={key: schema.to_density() for key, schema in fixture.states.items()},
        )

    # ==================== Reproduction ====================

    def _check_value(self, bundle: FixtureBundle, expected: ExpectedValue, tolerance: float) -> ReproductionCheck:
        entropies = self.orders.entropies
        povm = bundle.povms[expected.povm]
        rho = bundle.states[expected.rho]
        if expected.quantity == "observational_entropy":
            computed = entropies.observational_entropy(povm, rho, BITS)
        else:
            computed = entropies.relative_entropy(povm, rho, bundle.states[expected.sigma], BITS)
        target = expected.closed_form.evaluate()
        if math.isinf(target) or math.isinf(computed):
            difference = 0.0 if target == computed else math.inf
        else:
            difference = abs(computed - target)
        return ReproductionCheck(
            fixture=bundle.name,
            key=expected.key,
            kind="value",
            expected=target,
            computed=computed,
            difference=difference,
            passed=difference <= tolerance,
            provenance=f"{expected.display}; {expected.provenance}",
        )

    def _check_relation(
        self, bundle: FixtureBundle, expected: ExpectedRelation, budget: SearchBudget
    ) -> ReproductionCheck:
        n = bundle.povms[expected.coarser]
        m = bundle.povms[expected.finer]
        difference = None
        if expected.relation == "linear":
            computed: Union[bool, str] = self.orders.decide_linear(n, m) is not None
            passed = computed == expected.holds
        elif expected.relation == "stochastic":
            decision = self.orders.decide_stochastic(n, m)
            computed = decision.feasible
            difference = decision.margin
            passed = computed == expected.holds
            if passed and not expected.holds and expected.min_margin is not None:
                passed = decision.margin > expected.min_margin
        else:
            if expected.relation == OrderRelation.RELENT.value:
                verdict = self.orders.decide_relent_order(n, m, budget)
            else:
                verdict = self.orders.decide_entropy_order(n, m, budget)
            computed = verdict.status.value if verdict.status == VerdictStatus.UNKNOWN else verdict.holds
            passed = computed == expected.holds
            if passed and expected.certificate is not None:
                passed = verdict.certificate is not None and verdict.certificate.kind.value == expected.certificate
        return ReproductionCheck(
            fixture=bundle.name,
            key=expected.key,
            kind="relation",
            expected=expected.holds,
            computed=computed,
            difference=difference,
            passed=passed,
            provenance=expected.provenance,
        )

    def reproduce_fixture(
        self, fixture: ExampleFixture, tolerance: float, budget: Optional[SearchBudget] = None
    ) -> List[ReproductionCheck]:
        budget = budget or SearchBudget()
        bundle = self.bundle(fixture)
        checks = [self._check_value(bundle, value, tolerance) for value in fixture.expected_values]
        checks += [self._check_relation(bundle, relation, budget) for relation in fixture.expected_relations]
        for check in checks:
            if not check.passed:
                logger.warning(f"{check.fixture}/{check.key}: expected {check.expected}, computed {check.computed}")
        return checks

    def reproduce(
        self,
        tolerance: Optional[float] = None,
        budget: Optional[SearchBudget] = None,
        names: Optional[Iterable[str]] = None,
    ) -> ReproductionReport:
        """Compare every fixture's closed forms and relation tables against fresh computations."""
        tolerance = settings.REPRODUCE_TOLERANCE if tolerance is None else tolerance
        report = ReproductionReport(tolerance=tolerance)
        for name in names or self.list_fixtures():
            report.checks.extend(self.reproduce_fixture(self.get(name), tolerance, budget))
        logger.info(f"Reproduction: {len(report.checks) - len(report.failures())}/{len(report.checks)} checks passed")
        return report


def create_fixture_service(
    fixtures_dir: Optional[Path] = None, orders: Optional[OrderService] = None
) -> FixtureService:
    """Factory function to create a fixture service."""
    return FixtureService(fixtures_dir, orders)


# Singleton instance
fixture_service = create_fixture_service()
