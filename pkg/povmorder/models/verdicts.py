"""
Verdict models - Pydantic schemas for ordering decisions, certificates and witnesses.
"""
import math
from enum import Enum
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from povmorder.config import settings
from povmorder.models.schemas import StateSchema


def _render_extended(value: Optional[float]) -> Union[float, str, None]:
    if value is None or math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"


class VerdictStatus(str, Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


class OrderRelation(str, Enum):
    ENTROPY = "entropy"
    RELENT = "relent"


class CertificateKind(str, Enum):
    STOCHASTIC_MAP = "stochastic-map"
    IDENTITY_MIXING = "identity-mixing"
    PROJECTIVE_SHORTCUT = "projective-shortcut"
    IMPLICATION_CHAIN = "implication-chain"


PROJECTIVE_SHORTCUT = "projective-shortcut"


class SearchBudget(BaseModel):
    """Sampling budget of the falsification search."""

    model_config = ConfigDict(frozen=True)

    samples: int = Field(default_factory=lambda: settings.SEARCH_SAMPLES, ge=0)
    refine_steps: int = Field(default_factory=lambda: settings.SEARCH_REFINE_STEPS, ge=0)
    chunk_size: int = Field(default_factory=lambda: settings.SEARCH_CHUNK_SIZE, ge=1)
    workers: int = Field(default_factory=lambda: settings.SEARCH_WORKERS, ge=1)
    seed: int = Field(default_factory=lambda: settings.SEED)


class BudgetUsage(BaseModel):
    candidates: int = 0
    samples: int = 0
    refine_steps: int = 0


class Certificate(BaseModel):
    """Finite object proving that an ordering holds for every state."""

    kind: CertificateKind
    stochastic_map: Optional[List[List[float]]] = None
    lam: Optional[float] = None
    gamma: Optional[float] = None
    alpha_norm: Optional[float] = None
    bound: Optional[float] = None
    target: Optional[OrderRelation] = None
    derived_from: Optional[str] = None


class Witness(BaseModel):
    """State (or state pair) at which a claimed inequality fails by `margin`."""

    rho: StateSchema
    sigma: Optional[StateSchema] = None
    margin: float
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    source: str = "random-search"
    sample_index: Optional[int] = None

    @field_serializer("margin", "lhs", "rhs")
    def _serialize_extended(self, value: Optional[float]):
        return _render_extended(value)


class OrderVerdict(BaseModel):
    """Three-valued decision of one ordering in one direction."""

    relation: OrderRelation
    status: VerdictStatus
    certificate: Optional[Certificate] = None
    witness: Optional[Witness] = None
    reason: Optional[str] = None
    budget_used: BudgetUsage = Field(default_factory=BudgetUsage)

    @model_validator(mode="after")
    def _check_evidence(self) -> "OrderVerdict":
        if self.status == VerdictStatus.HOLDS and self.certificate is None:
            raise ValueError("a 'holds' verdict needs a certificate")
        if (
            self.status == VerdictStatus.REFUTED
            and self.witness is None
            and self.reason != PROJECTIVE_SHORTCUT
        ):
            raise ValueError("a 'refuted' verdict needs a witness or the projective shortcut")
        return self

    @property
    def holds(self) -> bool:
        return self.status == VerdictStatus.HOLDS

    @property
    def refuted(self) -> bool:
        return self.status == VerdictStatus.REFUTED

    def label(self) -> str:
        if self.status == VerdictStatus.HOLDS and self.certificate is not None:
            return f"holds ({self.certificate.kind.value})"
        if self.status == VerdictStatus.REFUTED:
            source = self.witness.source if self.witness else self.reason
            return f"refuted ({source})"
        return self.status.value


class LinearRelationSummary(BaseModel):
    alpha: List[List[float]]
    entry_l1_norm: float
    max_residual: float


class DirectionClassification(BaseModel):
    """All four orderings for `coarser` against `finer`."""

    coarser: str
    finer: str
    linear: bool
    linear_residual: float
    linear_relation: Optional[LinearRelationSummary] = None
    stochastic: bool
    stochastic_map: Optional[List[List[float]]] = None
    stochastic_margin: float = 0.0
    relent: OrderVerdict
    entropy: OrderVerdict


class PairClassification(BaseModel):
    n_vs_m: DirectionClassification
    m_vs_n: DirectionClassification
    equivalence: bool
    projective_flags: List[bool]
    budget: SearchBudget


class SeparationParameters(BaseModel):
    """beta, v and ||alpha|| of a linearly related pair with the mixing weights they allow."""

    dim: int
    alpha_norm: float
    beta: float
    vol_min: float
    lambda_prime: float
    lambda_double_prime: float

    @model_validator(mode="after")
    def _check_ranges(self) -> "SeparationParameters":
        slack = 1e-9
        for name in ("lambda_prime", "lambda_double_prime"):
            value = getattr(self, name)
            if not -slack <= value <= 0.5 + slack:
                raise ValueError(f"{name} = {value} outside [0, 1/2]")
        if self.beta > 1 + slack or self.vol_min > self.dim + slack:
            raise ValueError("beta must be <= 1 and vol_min <= d")
        return self
