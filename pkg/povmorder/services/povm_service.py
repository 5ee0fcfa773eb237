"""
POVM Service - validation, measurement statistics, structural predicates and
the canonical (merged, normalized-element) form.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from povmorder.config import Tolerances, settings
from povmorder.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidPovmError,
    ShapeMismatchError,
)
from povmorder.models import (
    Atom,
    CanonicalForm,
    DensityMatrix,
    OutcomeDistribution,
    Povm,
    PovmSchema,
    ValidationReport,
    Violation,
)
from povmorder.services.operator_service import OperatorService, create_operator_service

logger = logging.getLogger(__name__)


class PovmService:
    """Operations on single POVMs. Labels never enter a mathematical predicate."""

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        operators: Optional[OperatorService] = None,
    ):
        self.tol = tolerances or settings.tolerances()
        self.operators = operators or create_operator_service(self.tol)

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def validate(self, m: Povm) -> ValidationReport:
        """Report every positivity and completeness violation with its numeric margin."""
        violations: List[Violation] = []
        lowest = self.operators.min_eigenvalues(m.elements)
        for index, value in enumerate(lowest):
            if value < -self.tol.psd:
                violations.append(
                    Violation(
                        constraint="psd",
                        index=index,
                        margin=float(value),
                        message=f"element {index} ({m.labels[index]}) has eigenvalue {value:.6g}",
                    )
                )
        deviation = float(np.max(np.abs(m.total() - np.eye(m.dim))))
        if deviation > self.tol.trace:
            violations.append(
                Violation(
                    constraint="sum",
                    margin=deviation,
                    message=f"elements sum to identity only up to {deviation:.6g}",
                )
            )
        if violations:
            logger.debug(f"POVM with {m.count} elements failed validation: {len(violations)} violations")
        return ValidationReport(violations=violations)

    def validate_document(self, document: PovmSchema) -> ValidationReport:
        """Validate a wire document; non-Hermitian elements are reported instead of raised."""
        stack = document.decode_stack()
        deviation = np.max(np.abs(stack - stack.conj().transpose(0, 2, 1)), axis=(1, 2))
        violations = [
            Violation(
                constraint="hermitian",
                index=int(index),
                margin=float(deviation[index]),
                message=f"element {index} is not Hermitian: max |A - A^dagger| = {deviation[index]:.6g}",
            )
            for index in np.flatnonzero(deviation > self.tol.herm)
        ]
        if violations:
            return ValidationReport(violations=violations)
        return self.validate(document.to_povm())

    def require_valid(self, m: Povm) -> Povm:
        report = self.validate(m)
        if not report.valid:
            raise InvalidPovmError(f"Invalid POVM: {report.summary()}", report)
        return m

    # ------------------------------------------------------------------
    # Statistics
    # ------------------------------------------------------------------

    def _finish_probs(self, probs: np.ndarray) -> np.ndarray:
        lowest = float(probs.min()) if probs.size else 0.0
        if lowest < -self.tol.psd:
            raise InvalidPovmError(f"Negative outcome probability {lowest:.3e}; the POVM is not positive")
        probs = np.clip(probs, 0.0, 1.0)
        probs[probs <= self.tol.zero] = 0.0
        return probs

    def measure(self, m: Povm, rho: DensityMatrix) -> OutcomeDistribution:
        """p_k = tr(M_k rho) and V_k = tr(M_k)."""
        if m.dim != rho.dim:
            raise DimensionMismatchError(m.dim, rho.dim, "POVM and state")
        probs = np.einsum("kij,ji->k", m.elements, rho.matrix).real
        return OutcomeDistribution(probs=self._finish_probs(probs), volumes=m.volumes)

    def measure_batch(self, m: Povm, states: np.ndarray) -> np.ndarray:
        """(S, K) outcome probabilities for a (S, d, d) stack of states."""
        states = np.asarray(states)
        if states.shape[-1] != m.dim:
            raise DimensionMismatchError(m.dim, states.shape[-1], "POVM and states")
        probs = np.einsum("kij,sji->sk", m.elements, states).real
        return self._finish_probs(probs)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    def trivial(self, dim: int) -> Povm:
        if dim < 1:
            raise InvalidParameterError(f"Dimension must be positive, got {dim}")
        return Povm(np.eye(dim)[np.newaxis], ("1",))

    def computational_basis(self, dim: int) -> Povm:
        """Rank-one projectors |k><k|."""
        if dim < 1:
            raise InvalidParameterError(f"Dimension must be positive, got {dim}")
        eye = np.eye(dim)
        return Povm(np.einsum("ki,kj->kij", eye, eye))

    def disjoint_convex(
        self, lam: float, m: Povm, n: Povm, tags: Sequence[str] = ("m", "n")
    ) -> Povm:
        """lam*M on M's outcomes followed by (1 - lam)*N on N's outcomes."""
        if not 0.0 <= lam <= 1.0:
            raise InvalidParameterError(f"Mixing weight must lie in [0, 1], got {lam}")
        if m.dim != n.dim:
            raise DimensionMismatchError(m.dim, n.dim, "POVMs")
        elements = np.concatenate([lam * m.elements, (1.0 - lam) * n.elements])
        labels = [f"{tags[0]}:{label}" for label in m.labels] + [f"{tags[1]}:{label}" for label in n.labels]
        return Povm(elements, tuple(labels))

    def permute(self, m: Povm, order: Sequence[int]) -> Povm:
        order = list(order)
        if sorted(order) != list(range(m.count)):
            raise ShapeMismatchError(f"{order} is not a permutation of {m.count} outcomes")
        return Povm(m.elements[order], tuple(m.labels[k] for k in order))

    def split_element(self, m: Povm, index: int, weights: Sequence[float]) -> Povm:
        """Replace M_index by the proportional pieces w_i * M_index (weights sum to 1)."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.size == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > self.tol.trace:
            raise InvalidParameterError(f"Split weights must be non-negative and sum to 1, got {weights}")
        pieces = weights[:, None, None] * m.elements[index]
        elements = np.concatenate([m.elements[:index], pieces, m.elements[index + 1:]])
        label = m.labels[index]
        labels = m.labels[:index] + tuple(f"{label}.{i}" for i in range(weights.size)) + m.labels[index + 1:]
        return Povm(elements, labels)

    def append_zero(self, m: Povm, count: int = 1) -> Povm:
        zeros = np.zeros((count, m.dim, m.dim), dtype=np.complex128)
        labels = m.labels + tuple(f"zero{i}" for i in range(count))
        return Povm(np.concatenate([m.elements, zeros]), labels)

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    def is_projective(self, m: Povm) -> bool:
        """P_x P_y = delta_xy P_x for every pair, in operator norm."""
        products = np.einsum("xij,yjk->xyik", m.elements, m.elements)
        expected = np.zeros_like(products)
        idx = np.arange(m.count)
        expected[idx, idx] = m.elements
        deviation = np.linalg.norm(products - expected, ord=2, axis=(-2, -1))
        return bool(np.all(deviation <= self.tol.psd))

    def is_linearly_independent(self, m: Povm) -> bool:
        return len(self.operators.orthonormalize(list(m.elements), self.tol.span)) == m.count

    def canonical_form(self, m: Povm) -> CanonicalForm:
        """
        Drop zero elements, normalize the rest to unit trace and merge proportional
        ones. Atoms are sorted lexicographically on their rounded entries.
        """
        volumes = m.volumes
        groups: List[List[int]] = []
        reps: List[np.ndarray] = []
        for index in np.flatnonzero(volumes > self.tol.trace):
            mu = m.elements[index] / volumes[index]
            for group, rep in zip(groups, reps):
                cos = np.vdot(rep, mu).real / (np.linalg.norm(rep) * np.linalg.norm(mu))
                if 1.0 - cos <= self.tol.prop:
                    group.append(int(index))
                    break
            else:
                groups.append([int(index)])
                reps.append(mu)

        atoms = []
        for group in groups:
            weights = volumes[group]
            total = float(weights.sum())
            mu = np.einsum("k,kij->ij", weights, m.elements[group] / weights[:, None, None]) / total
            mu = 0.5 * (mu + mu.conj().T)
            atoms.append(Atom(mu=mu, volume=total, members=tuple(group)))
        atoms.sort(key=_atom_sort_key)
        return CanonicalForm(dim=m.dim, atoms=tuple(atoms))


def _atom_sort_key(atom: Atom):
    flat = np.round(atom.mu, 8).ravel()
    return tuple(np.column_stack([flat.real, flat.imag]).ravel().tolist())


def create_povm_service(
    tolerances: Optional[Tolerances] = None, operators: Optional[OperatorService] = None
) -> PovmService:
    """Factory function to create a POVM service."""
    return PovmService(tolerances, operators)


# Singleton instance
povm_service = create_povm_service()
