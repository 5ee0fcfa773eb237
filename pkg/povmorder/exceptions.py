"""
Exception hierarchy for povmorder.
Every error raised by the services derives from PovmOrderError, itself a ValueError.
"""
from typing import Any, Optional


class PovmOrderError(ValueError):
    """Base class for all povmorder errors."""


class DimensionMismatchError(PovmOrderError):
    """Operands live in Hilbert spaces of different dimension."""

    def __init__(self, left: int, right: int, what: str = "operands"):
        super().__init__(f"Dimension mismatch between {what}: {left} != {right}")
        self.left = left
        self.right = right


class ShapeMismatchError(PovmOrderError):
    """Array shapes do not line up (lengths, element counts, map shapes)."""


class NonHermitianError(PovmOrderError):
    """An operator differs from its conjugate transpose beyond tolerance."""


class InvalidStateError(PovmOrderError):
    """A matrix is not a density matrix (or not a traceless Hermitian direction)."""


class InvalidPovmError(PovmOrderError):
    """A POVM fails positivity or completeness, or its statistics are inconsistent."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class InvalidStochasticMapError(PovmOrderError):
    """A matrix has negative entries or columns not summing to one."""


class InvalidParameterError(PovmOrderError):
    """A scalar parameter lies outside its admissible range."""


class SingularMapError(PovmOrderError):
    """A stochastic map that must be invertible is singular."""


class LinearlyDependentError(PovmOrderError):
    """A POVM that must be linearly independent is not."""


class NoLinearRelationError(PovmOrderError):
    """span(N) is not contained in span(M)."""


class StencilOutsideStateSpaceError(PovmOrderError):
    """A finite-difference stencil point leaves the positive semidefinite cone."""


class ResamplingExhaustedError(PovmOrderError):
    """No admissible random direction was found within the resampling limit."""


class UnknownFixtureError(PovmOrderError):
    """The requested fixture is not in the registry."""


class SchemaError(PovmOrderError):
    """A JSON document does not follow the POVM/state schema."""


class InconsistentClassificationError(PovmOrderError):
    """Verdicts contradict the chain stochastic -> relent -> entropy -> linear."""
