"""
Operator Service - Hermitian operator arithmetic and Hilbert-Schmidt geometry.
Also owns the fixed real coordinate system used for operator equalities and the
seeded samplers that drive the falsification search.
"""
import logging
from functools import lru_cache
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from povmorder.config import Tolerances, settings
from povmorder.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    ShapeMismatchError,
)
from povmorder.models import (
    DensityMatrix,
    EntropyConfig,
    HermitianOperator,
    OperatorSpanBasis,
    TracelessHermitian,
)

logger = logging.getLogger(__name__)

OperatorLike = Union[HermitianOperator, np.ndarray]
Ensemble = Literal["pure", "hilbert-schmidt"]


def _matrix(op: OperatorLike) -> np.ndarray:
    return op.matrix if isinstance(op, HermitianOperator) else np.asarray(op, dtype=np.complex128)


@lru_cache(maxsize=32)
def _gell_mann_stack(dim: int) -> np.ndarray:
    """Identity/sqrt(d), then symmetric, antisymmetric and diagonal generators, all of HS norm 1."""
    mats = [np.eye(dim, dtype=np.complex128) / np.sqrt(dim)]
    pairs = [(j, k) for j in range(dim) for k in range(j + 1, dim)]
    for j, k in pairs:
        sym = np.zeros((dim, dim), dtype=np.complex128)
        sym[j, k] = sym[k, j] = 1.0 / np.sqrt(2.0)
        mats.append(sym)
    for j, k in pairs:
        anti = np.zeros((dim, dim), dtype=np.complex128)
        anti[j, k] = -1j / np.sqrt(2.0)
        anti[k, j] = 1j / np.sqrt(2.0)
        mats.append(anti)
    for level in range(1, dim):
        diag = np.zeros(dim)
        diag[:level] = 1.0
        diag[level] = -level
        mats.append(np.diag(diag / np.sqrt(level * (level + 1))).astype(np.complex128))
    stack = np.stack(mats)
    stack.setflags(write=False)
    return stack


class OperatorService:
    """
    Dense Hermitian operator toolkit.

    Every method is a pure function of its inputs; samplers take an explicit seed
    or a numpy Generator.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        self.tol = tolerances or settings.tolerances()

    # ------------------------------------------------------------------
    # Hilbert-Schmidt geometry
    # ------------------------------------------------------------------

    def hs_inner(self, a: OperatorLike, b: OperatorLike) -> float:
        """tr(a^dagger b), real for Hermitian inputs."""
        ma, mb = _matrix(a), _matrix(b)
        if ma.shape != mb.shape:
            raise DimensionMismatchError(ma.shape[0], mb.shape[0], "operators")
        return float(np.vdot(ma, mb).real)

    def hs_norm(self, a: OperatorLike) -> float:
        return float(np.linalg.norm(_matrix(a)))

    def operator_norm(self, a: OperatorLike) -> float:
        """Largest singular value."""
        return float(np.linalg.norm(_matrix(a), ord=2))

    def min_eigenvalue(self, a: OperatorLike) -> float:
        m = _matrix(a)
        if not isinstance(a, HermitianOperator):
            a = HermitianOperator(m)
        return float(np.linalg.eigvalsh(a.matrix)[0])

    def min_eigenvalues(self, stack: np.ndarray) -> np.ndarray:
        """Smallest eigenvalue of each operator in a (K, d, d) stack."""
        herm = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
        return np.linalg.eigvalsh(herm)[..., 0]

    # ------------------------------------------------------------------
    # Fixed Hermitian coordinates
    # ------------------------------------------------------------------

    def gell_mann_basis(self, dim: int) -> List[HermitianOperator]:
        if dim < 1:
            raise InvalidParameterError(f"Dimension must be positive, got {dim}")
        return [HermitianOperator(mat) for mat in _gell_mann_stack(dim)]

    def hermitian_coordinates(self, ops: Union[OperatorLike, np.ndarray]) -> np.ndarray:
        """
        Real coordinates in the HS-orthonormal Gell-Mann basis.

        A single d x d operator gives a vector of length d^2, a (K, d, d) stack gives
        a (K, d^2) matrix. Inner products are preserved.
        """
        m = _matrix(ops)
        dim = m.shape[-1]
        basis = _gell_mann_stack(dim)
        return np.einsum("bij,...ji->...b", basis, m).real

    def from_coordinates(self, coords: np.ndarray, dim: int) -> np.ndarray:
        basis = _gell_mann_stack(dim)
        return np.einsum("...b,bij->...ij", np.asarray(coords, dtype=np.float64), basis)

    # ------------------------------------------------------------------
    # Spans
    # ------------------------------------------------------------------

    def orthonormalize(
        self, ops: Sequence[OperatorLike], tol: Optional[float] = None, dim: Optional[int] = None
    ) -> OperatorSpanBasis:
        """
        Modified Gram-Schmidt with one reorthogonalization pass.
        An input whose residual is at most tol * ||input|| is dropped.
        """
        tol = self.tol.span if tol is None else tol
        mats = [_matrix(op) for op in ops]
        if not mats:
            return OperatorSpanBasis(dim=dim or 1)
        dim = mats[0].shape[0]
        for mat in mats:
            if mat.shape != (dim, dim):
                raise DimensionMismatchError(dim, mat.shape[0], "operators")

        rows: List[np.ndarray] = []
        for vec in self.hermitian_coordinates(np.stack(mats)):
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                continue
            residual = vec.copy()
            for _ in range(2):
                for q in rows:
                    residual -= np.dot(q, residual) * q
            remaining = np.linalg.norm(residual)
            if remaining <= tol * norm:
                continue
            rows.append(residual / remaining)

        coords = np.array(rows).reshape(len(rows), dim * dim)
        basis = tuple(HermitianOperator(mat) for mat in self.from_coordinates(coords, dim))
        return OperatorSpanBasis(dim=dim, basis=basis, coordinates=coords)

    def project_residual(
        self, a: OperatorLike, basis: OperatorSpanBasis
    ) -> Tuple[np.ndarray, float]:
        """Coefficients of the orthogonal projection onto span(basis) and the HS residual norm."""
        m = _matrix(a)
        if m.shape[0] != basis.dim:
            raise DimensionMismatchError(m.shape[0], basis.dim, "operator and basis")
        vec = self.hermitian_coordinates(m)
        coeffs = basis.coordinates @ vec
        residual = vec - basis.coordinates.T @ coeffs
        return coeffs, float(np.linalg.norm(residual))

    def complement_component(self, a: OperatorLike, basis: OperatorSpanBasis) -> np.ndarray:
        """The part of `a` orthogonal to span(basis), as a d x d matrix."""
        vec = self.hermitian_coordinates(_matrix(a))
        residual = vec - basis.coordinates.T @ (basis.coordinates @ vec)
        return self.from_coordinates(residual, basis.dim)

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    @staticmethod
    def _ginibre(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def random_density_batch(
        self, rng: np.random.Generator, dim: int, count: int, ensemble: Ensemble = "hilbert-schmidt"
    ) -> np.ndarray:
        """(count, d, d) stack of density matrices from one generator."""
        if dim < 1:
            raise InvalidParameterError(f"Dimension must be positive, got {dim}")
        if ensemble == "pure":
            psi = self._ginibre(rng, (count, dim))
            psi /= np.linalg.norm(psi, axis=1, keepdims=True)
            return np.einsum("ki,kj->kij", psi, psi.conj())
        if ensemble == "hilbert-schmidt":
            g = self._ginibre(rng, (count, dim, dim))
            rho = g @ np.conj(np.swapaxes(g, -1, -2))
            return rho / np.einsum("kii->k", rho).real[:, None, None]
        raise InvalidParameterError(f"Unknown ensemble {ensemble!r}")

    def random_density(self, dim: int, ensemble: Ensemble = "hilbert-schmidt", seed: int = 0) -> DensityMatrix:
        rng = np.random.default_rng(seed)
        return DensityMatrix(self.random_density_batch(rng, dim, 1, ensemble)[0])

    def random_traceless_batch(self, rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
        if dim < 2:
            raise InvalidParameterError(f"Traceless directions need d >= 2, got {dim}")
        g = self._ginibre(rng, (count, dim, dim))
        x = 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))
        trace = np.einsum("kii->k", x).real
        return x - (trace / dim)[:, None, None] * np.eye(dim)

    def random_traceless(self, dim: int, seed: int = 0) -> TracelessHermitian:
        rng = np.random.default_rng(seed)
        return TracelessHermitian(self.random_traceless_batch(rng, dim, 1)[0])

    def random_near_mixed_batch(self, rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
        """(1 + eps x)/d for random traceless x, eps uniform up to 0.9 of the positivity radius."""
        if dim < 2:
            return self.random_density_batch(rng, dim, count)
        x = self.random_traceless_batch(rng, dim, count)
        lowest = np.linalg.eigvalsh(x)[:, 0]
        eps = rng.uniform(0.0, 0.9, size=count) / np.abs(lowest)
        return (np.eye(dim) + eps[:, None, None] * x) / dim

    def random_unitary(self, dim: int, seed: int = 0) -> np.ndarray:
        """Haar unitary from the QR decomposition of a Ginibre matrix with phase correction."""
        rng = np.random.default_rng(seed)
        q, r = np.linalg.qr(self._ginibre(rng, (dim, dim)))
        phases = np.diag(r) / np.abs(np.diag(r))
        return q * phases

    # ------------------------------------------------------------------
    # Distributions and spectra
    # ------------------------------------------------------------------

    def prob_trace_distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        p_arr, q_arr = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
        if p_arr.shape != q_arr.shape:
            raise ShapeMismatchError(f"Distributions have lengths {p_arr.size} and {q_arr.size}")
        return float(0.5 * np.abs(p_arr - q_arr).sum())

    def von_neumann_entropy(self, rho: OperatorLike, cfg: Optional[EntropyConfig] = None) -> float:
        cfg = cfg or EntropyConfig()
        eigs = np.linalg.eigvalsh(0.5 * (_matrix(rho) + _matrix(rho).conj().T))
        eigs = eigs[eigs > self.tol.zero]
        return float(-np.sum(eigs * np.log(eigs)) / cfg.ln_base)


def create_operator_service(tolerances: Optional[Tolerances] = None) -> OperatorService:
    """Factory function to create an operator service."""
    return OperatorService(tolerances)


# Singleton instance
operator_service = create_operator_service()
