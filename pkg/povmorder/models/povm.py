"""
POVM data model: element stacks, outcome statistics and canonical forms.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from povmorder.config import active_tolerances
from povmorder.exceptions import NonHermitianError, ShapeMismatchError
from povmorder.models.operators import HermitianOperator


@dataclass(frozen=True, eq=False)
class Povm:
    """
    Finite ordered list of Hermitian elements acting on C^d.

    Elements are stored as one read-only (K, d, d) complex array. Positivity and
    completeness are not enforced here: an invalid POVM can still be built so that
    the POVM service can report what is wrong with it.
    """

    elements: np.ndarray
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        stack = np.array(self.elements, dtype=np.complex128)
        if stack.ndim == 2:
            stack = stack[np.newaxis]
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2] or stack.shape[1] == 0:
            raise ShapeMismatchError(f"POVM elements must be a stack of d x d matrices, got {stack.shape}")
        if stack.shape[0] == 0:
            raise ShapeMismatchError("A POVM needs at least one element")

        deviation = np.max(np.abs(stack - stack.conj().transpose(0, 2, 1)), axis=(1, 2))
        worst = int(np.argmax(deviation))
        if deviation[worst] > active_tolerances().herm:
            raise NonHermitianError(
                f"POVM element {worst} is not Hermitian: max |A - A^dagger| = {deviation[worst]:.3e}"
            )
        stack = 0.5 * (stack + stack.conj().transpose(0, 2, 1))
        stack.setflags(write=False)
        object.__setattr__(self, "elements", stack)

        labels = tuple(str(label) for label in self.labels) or tuple(str(k) for k in range(stack.shape[0]))
        if len(labels) != stack.shape[0]:
            raise ShapeMismatchError(f"{len(labels)} labels given for {stack.shape[0]} elements")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_operators(
        cls, operators: Sequence[Any], labels: Optional[Sequence[str]] = None
    ) -> "Povm":
        """Build from HermitianOperator instances or raw matrices."""
        mats = [op.matrix if isinstance(op, HermitianOperator) else np.asarray(op) for op in operators]
        dims = {np.shape(mat) for mat in mats}
        if len(dims) > 1:
            raise ShapeMismatchError(f"POVM elements have mixed shapes: {sorted(dims)}")
        return cls(np.stack(mats), tuple(labels or ()))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def count(self) -> int:
        return self.elements.shape[0]

    def __len__(self) -> int:
        return self.count

    @property
    def volumes(self) -> np.ndarray:
        """V_k = tr(M_k)."""
        return np.einsum("kii->k", self.elements).real

    def element(self, index: int) -> HermitianOperator:
        return HermitianOperator(self.elements[index])

    def total(self) -> np.ndarray:
        return self.elements.sum(axis=0)

    def with_labels(self, labels: Sequence[str]) -> "Povm":
        return Povm(self.elements, tuple(labels))

    def __repr__(self) -> str:
        return f"Povm(dim={self.dim}, count={self.count}, labels={list(self.labels)})"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome probabilities p_k = tr(M_k rho) together with volumes V_k."""

    probs: np.ndarray
    volumes: np.ndarray

    def to_dict(self) -> Dict[str, List[float]]:
        return {"probs": self.probs.tolist(), "volumes": self.volumes.tolist()}


@dataclass(frozen=True, eq=False)
class Atom:
    """A unit-trace direction mu carrying total volume V(mu)."""

    mu: np.ndarray
    volume: float
    members: Tuple[int, ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu": [[[float(z.real), float(z.imag)] for z in row] for row in self.mu],
            "volume": self.volume,
            "members": list(self.members),
        }


@dataclass(frozen=True)
class CanonicalForm:
    """Merged normalized-element volume map {mu -> V(mu)} in deterministic order."""

    dim: int
    atoms: Tuple[Atom, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def volumes(self) -> np.ndarray:
        return np.array([atom.volume for atom in self.atoms])

    @property
    def directions(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.dim, self.dim), dtype=np.complex128)
        return np.stack([atom.mu for atom in self.atoms])

    def as_povm(self) -> Povm:
        """The intermediary POVM with elements V(mu) mu."""
        return Povm(self.directions * self.volumes[:, None, None])

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "atoms": [atom.to_dict() for atom in self.atoms]}
