"""
Fixture models - Pydantic schemas for versioned example bundles and reproduction reports.
"""
import math
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, computed_field, field_serializer

from povmorder.models.schemas import PovmSchema, StateSchema


class LogTerm(BaseModel):
    """coef * log2(arg); a missing arg means the bare rational `coef`."""

    coef: str
    log2: Optional[str] = None

    def evaluate(self) -> float:
        coef = float(Fraction(self.coef))
        if self.log2 is None:
            return coef
        return coef * math.log2(Fraction(self.log2))


class ClosedForm(BaseModel):
    """Exact expression sum_i coef_i log2(arg_i), or +inf."""

    terms: List[LogTerm] = Field(default_factory=list)
    infinite: bool = False

    def evaluate(self) -> float:
        if self.infinite:
            return math.inf
        return math.fsum(term.evaluate() for term in self.terms)


class ExpectedValue(BaseModel):
    key: str
    quantity: Literal["observational_entropy", "relative_entropy"]
    povm: str
    rho: str
    sigma: Optional[str] = None
    closed_form: ClosedForm
    display: str
    units: Literal["bits"] = "bits"
    provenance: str


class ExpectedRelation(BaseModel):
    key: str
    coarser: str
    finer: str
    relation: Literal["linear", "stochastic", "relent", "entropy"]
    holds: bool
    certificate: Optional[str] = None
    min_margin: Optional[float] = None
    provenance: str


class ExampleFixture(BaseModel):
    """Exact-entried POVMs and states with their expected values and relation tables."""

    name: str
    version: str = "v1"
    description: str
    povms: Dict[str, PovmSchema]
    states: Dict[str, StateSchema]
    expected_values: List[ExpectedValue] = Field(default_factory=list)
    expected_relations: List[ExpectedRelation] = Field(default_factory=list)


class ReproductionCheck(BaseModel):
    fixture: str
    key: str
    kind: Literal["value", "relation"]
    expected: Union[float, bool, str]
    computed: Union[float, bool, str]
    difference: Optional[float] = None
    passed: bool
    provenance: str

    @field_serializer("expected", "computed", "difference")
    def _serialize_extended(self, value):
        if isinstance(value, float) and not math.isfinite(value):
            return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
        return value


class ReproductionReport(BaseModel):
    tolerance: float
    checks: List[ReproductionCheck] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ReproductionCheck]:
        return [check for check in self.checks if not check.passed]

    def to_markdown(self) -> str:
        lines = [
            f"# Reproduction report (tolerance {self.tolerance:g})",
            "",
            "| fixture | key | expected | computed | status |",
            "|---|---|---|---|---|",
        ]
        for check in self.checks:
            status = "ok" if check.passed else "MISMATCH"
            lines.append(
                f"| {check.fixture} | {check.key} | {_fmt(check.expected)} | {_fmt(check.computed)} | {status} |"
            )
        lines.append("")
        lines.append(f"{len(self.checks) - len(self.failures())}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, bool) or isinstance(value, str):
        return str(value).lower()
    if not math.isfinite(value):
        return "inf"
    return f"{value:.6f}"
