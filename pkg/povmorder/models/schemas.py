"""
Wire schemas - Pydantic models for POVM/state JSON documents, validation reports
and entropy units.
"""
import math
from enum import Enum
from fractions import Fraction
from typing import Any, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from povmorder.exceptions import SchemaError
from povmorder.models.operators import DensityMatrix
from povmorder.models.povm import Povm

# A real number given as a JSON number or as an exact rational string such as "3/4".
Scalar = Union[float, str]
ComplexEntry = List[Scalar]
MatrixRows = List[List[ComplexEntry]]


def parse_scalar(value: Scalar) -> float:
    """Render a JSON number or rational string ("3/4", "-1", "0.25") to a double."""
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(Fraction(value.strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(f"Invalid numeric entry {value!r}: {e}")


def decode_matrix(rows: MatrixRows, dim: int) -> np.ndarray:
    """Row-major [[ [re, im], ...], ...] to a complex d x d array."""
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise SchemaError(f"Matrix must be {dim} x {dim}")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if len(entry) != 2:
                raise SchemaError(f"Entry ({i}, {j}) must be a [re, im] pair, got {entry!r}")
            out[i, j] = complex(parse_scalar(entry[0]), parse_scalar(entry[1]))
    return out


def encode_matrix(matrix: np.ndarray) -> MatrixRows:
    """Inverse of decode_matrix; floats keep full precision."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


class PovmSchema(BaseModel):
    """`{"dim": d, "elements": [...], "labels": [...]}`"""

    dim: int = Field(..., ge=1)
    elements: List[MatrixRows] = Field(..., min_length=1)
    labels: Optional[List[str]] = None

    def decode_stack(self) -> np.ndarray:
        """(K, d, d) complex elements, Hermitian or not."""
        return np.stack([decode_matrix(rows, self.dim) for rows in self.elements])

    def to_povm(self) -> Povm:
        if self.labels is not None and len(self.labels) != len(self.elements):
            raise SchemaError(f"{len(self.labels)} labels for {len(self.elements)} elements")
        return Povm(self.decode_stack(), tuple(self.labels or ()))

    @classmethod
    def from_povm(cls, povm: Povm) -> "PovmSchema":
        return cls(
            dim=povm.dim,
            elements=[encode_matrix(element) for element in povm.elements],
            labels=list(povm.labels),
        )


class StateSchema(BaseModel):
    """`{"dim": d, "matrix": [...]}`"""

    dim: int = Field(..., ge=1)
    matrix: MatrixRows

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(decode_matrix(self.matrix, self.dim))

    @classmethod
    def from_matrix(cls, matrix: Any) -> "StateSchema":
        mat = np.asarray(getattr(matrix, "matrix", matrix))
        return cls(dim=mat.shape[0], matrix=encode_matrix(mat))


class Violation(BaseModel):
    """One failed POVM constraint."""

    constraint: Literal["psd", "sum", "hermitian"]
    index: Optional[int] = None
    margin: float
    message: str


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @computed_field
    @property
    def valid(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.valid:
            return "valid"
        return "; ".join(v.message for v in self.violations)


class LogBase(str, Enum):
    BITS = "2"
    NATS = "e"


class EntropyConfig(BaseModel):
    """Information units for every entropy evaluation."""

    model_config = ConfigDict(frozen=True)

    log_base: LogBase = LogBase.BITS

    @property
    def ln_base(self) -> float:
        return math.log(2.0) if self.log_base == LogBase.BITS else 1.0

    @property
    def unit_constant(self) -> float:
        """log e in the configured base (log2 e for bits, 1 for nats)."""
        return 1.0 / self.ln_base

    @property
    def units(self) -> str:
        return "bits" if self.log_base == LogBase.BITS else "nats"

    def from_nats(self, value: float) -> float:
        return value / self.ln_base
