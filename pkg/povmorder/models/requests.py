"""
Request/response models - Pydantic schemas for the HTTP surface.
"""
import math
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_serializer

from povmorder.models.schemas import LogBase, PovmSchema, StateSchema
from povmorder.models.verdicts import SearchBudget, SeparationParameters


class EntropyRequest(BaseModel):
    povm: PovmSchema
    rho: StateSchema
    log_base: LogBase = LogBase.BITS


class RelativeEntropyRequest(EntropyRequest):
    sigma: StateSchema


class EntropyValue(BaseModel):
    quantity: str
    value: float
    units: str

    @field_serializer("value")
    def _serialize_value(self, value: float) -> Union[float, str]:
        return value if math.isfinite(value) else "inf"


class PairRequest(BaseModel):
    n: PovmSchema
    m: PovmSchema


class ClassifyRequest(PairRequest):
    budget: Optional[SearchBudget] = None


class EquivalenceResponse(BaseModel):
    equivalent: bool
    m_to_n: Optional[List[List[float]]] = None
    n_to_m: Optional[List[List[float]]] = None


class EpsMixRequest(BaseModel):
    """Binary POVM (A, B) mixed with 2 eps of noise; defaults to the computational basis."""

    n: Optional[PovmSchema] = None
    eps: float = Field(..., gt=0.0, lt=0.5)


class NLambdaRequest(BaseModel):
    n: PovmSchema
    lam: float = Field(..., ge=0.0, le=1.0)
    m: Optional[PovmSchema] = None


class ConstructResponse(BaseModel):
    povms: Dict[str, PovmSchema]
    details: Dict[str, Any] = Field(default_factory=dict)
    separation: Optional[SeparationParameters] = None
