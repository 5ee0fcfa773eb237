"""
Operator value types: Hermitian operators, density matrices, traceless directions
and orthonormal operator bases. All instances are immutable after construction.
"""
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

from povmorder.config import active_tolerances
from povmorder.exceptions import InvalidStateError, NonHermitianError, ShapeMismatchError


def _frozen_square(matrix: np.ndarray) -> np.ndarray:
    m = np.array(matrix, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeMismatchError(f"Expected a non-empty square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense complex d x d operator equal to its conjugate transpose."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_square(self.matrix)
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation > active_tolerances().herm:
            raise NonHermitianError(
                f"Operator is not Hermitian: max |A - A^dagger| = {deviation:.3e}"
            )
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class DensityMatrix(HermitianOperator):
    """Positive semidefinite unit-trace operator (symbols rho, sigma)."""

    def __post_init__(self):
        super().__post_init__()
        trace = self.trace
        tol = active_tolerances()
        if abs(trace - 1.0) > tol.trace:
            raise InvalidStateError(f"Density matrix trace is {trace!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(self.matrix)[0])
        if lowest < -tol.psd:
            raise InvalidStateError(f"Density matrix has negative eigenvalue {lowest:.3e}")

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def pure(cls, vector: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False, repr=False)
class TracelessHermitian(HermitianOperator):
    """Hermitian direction with vanishing trace (curves rho_t = 1/d + t X)."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.trace) > active_tolerances().trace:
            raise InvalidStateError(f"Direction has trace {self.trace!r}, expected 0")


@dataclass(frozen=True, eq=False)
class OperatorSpanBasis:
    """Hilbert-Schmidt orthonormal basis of a span of Hermitian operators.

    `coordinates` holds the basis in the fixed real coordinate system of the
    operator service, one row per basis operator.
    """

    dim: int
    basis: Tuple[HermitianOperator, ...] = ()
    coordinates: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.basis) > self.dim ** 2:
            raise ShapeMismatchError(
                f"A basis of d={self.dim} operators has at most {self.dim ** 2} elements"
            )
        coords = self.coordinates
        if coords is None:
            coords = np.zeros((0, self.dim ** 2))
        coords = np.array(coords, dtype=np.float64).reshape(len(self.basis), self.dim ** 2)
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self) -> Iterator[HermitianOperator]:
        return iter(self.basis)
