"""
Entropy Service - measured relative entropy, observational entropy, Pinsker-type
bounds and derivatives of relative entropy along curves through the maximally
mixed state.

Conventions (frozen): a zero probability contributes 0 whatever its partner is;
p > 0 against q = 0 gives +inf.
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from povmorder.config import Tolerances, settings
from povmorder.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidPovmError,
    ShapeMismatchError,
    StencilOutsideStateSpaceError,
)
from povmorder.models import (
    DensityMatrix,
    EntropyConfig,
    HermitianOperator,
    LinearRelation,
    Povm,
    TracelessHermitian,
)
from povmorder.services.operator_service import OperatorService
from povmorder.services.povm_service import PovmService, create_povm_service

logger = logging.getLogger(__name__)

# Central finite-difference stencils: offsets (in units of h), weights, denominator power.
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


class EntropyService:
    """Entropies of POVM statistics in bits or nats (see EntropyConfig)."""

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        povms: Optional[PovmService] = None,
        cfg: Optional[EntropyConfig] = None,
    ):
        self.tol = tolerances or settings.tolerances()
        self.povms = povms or create_povm_service(self.tol)
        self.cfg = cfg or EntropyConfig(log_base=settings.LOG_BASE)

    @property
    def operators(self) -> OperatorService:
        return self.povms.operators

    def _cfg(self, cfg: Optional[EntropyConfig]) -> EntropyConfig:
        return cfg or self.cfg

    # ------------------------------------------------------------------
    # Classical quantities
    # ------------------------------------------------------------------

    def kl_divergence_batch(self, p: np.ndarray, q: np.ndarray, cfg: Optional[EntropyConfig] = None) -> np.ndarray:
        """Row-wise D(p || q); rows with p > 0 where q = 0 are +inf."""
        p = np.atleast_2d(np.asarray(p, dtype=np.float64))
        q = np.atleast_2d(np.asarray(q, dtype=np.float64))
        if p.shape[-1] != q.shape[-1]:
            raise ShapeMismatchError(f"Distributions have lengths {p.shape[-1]} and {q.shape[-1]}")
        p, q = np.broadcast_arrays(p, q)
        support = p > 0
        blocked = np.any(support & (q <= 0), axis=-1)
        ratio = np.where(support & (q > 0), p / np.where(q > 0, q, 1.0), 1.0)
        terms = np.where(support, p * np.log(np.where(support, ratio, 1.0)), 0.0)
        values = terms.sum(axis=-1) / self._cfg(cfg).ln_base
        return np.where(blocked, np.inf, values)

    def kl_divergence(self, p: Sequence[float], q: Sequence[float], cfg: Optional[EntropyConfig] = None) -> float:
        p_arr, q_arr = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
        if p_arr.shape != q_arr.shape:
            raise ShapeMismatchError(f"Distributions have lengths {p_arr.size} and {q_arr.size}")
        return float(self.kl_divergence_batch(p_arr, q_arr, cfg)[0])

    def observational_entropy_from_probs(
        self, probs: np.ndarray, volumes: np.ndarray, cfg: Optional[EntropyConfig] = None
    ) -> np.ndarray:
        """Row-wise -sum_k p_k log(p_k / V_k)."""
        probs = np.atleast_2d(probs)
        empty = volumes <= self.tol.trace
        if np.any(probs[:, empty] > self.tol.psd):
            raise InvalidPovmError("Positive probability on an outcome of zero volume")
        live = (probs > 0) & ~empty
        safe_v = np.where(empty, 1.0, volumes)
        terms = np.where(live, probs * np.log(np.where(live, probs, 1.0) / safe_v), 0.0)
        return -terms.sum(axis=-1) / self._cfg(cfg).ln_base

    # ------------------------------------------------------------------
    # Measured entropies
    # ------------------------------------------------------------------

    def relative_entropy(
        self, m: Povm, rho: DensityMatrix, sigma: DensityMatrix, cfg: Optional[EntropyConfig] = None
    ) -> float:
        """D_M(rho || sigma): KL divergence of the outcome distributions."""
        if rho.dim != sigma.dim:
            raise DimensionMismatchError(rho.dim, sigma.dim, "states")
        p = self.povms.measure(m, rho).probs
        q = self.povms.measure(m, sigma).probs
        return float(self.kl_divergence_batch(p, q, cfg)[0])

    def relative_entropy_batch(
        self, m: Povm, rhos: np.ndarray, sigmas: np.ndarray, cfg: Optional[EntropyConfig] = None
    ) -> np.ndarray:
        return self.kl_divergence_batch(
            self.povms.measure_batch(m, rhos), self.povms.measure_batch(m, sigmas), cfg
        )

    def observational_entropy(self, m: Povm, rho: DensityMatrix, cfg: Optional[EntropyConfig] = None) -> float:
        """S_M(rho) = -sum_k p_k log(p_k / V_k)."""
        dist = self.povms.measure(m, rho)
        return float(self.observational_entropy_from_probs(dist.probs, dist.volumes, cfg)[0])

    def observational_entropy_batch(
        self, m: Povm, states: np.ndarray, cfg: Optional[EntropyConfig] = None
    ) -> np.ndarray:
        return self.observational_entropy_from_probs(self.povms.measure_batch(m, states), m.volumes, cfg)

    def oe_from_relent_identity_check(
        self, m: Povm, rho: DensityMatrix, cfg: Optional[EntropyConfig] = None
    ) -> Tuple[float, float]:
        """Both sides of S_M(rho) = log d - D_M(rho || 1/d)."""
        cfg = self._cfg(cfg)
        lhs = self.observational_entropy(m, rho, cfg)
        mixed = DensityMatrix.maximally_mixed(m.dim)
        rhs = math.log(m.dim) / cfg.ln_base - self.relative_entropy(m, rho, mixed, cfg)
        return lhs, rhs

    # ------------------------------------------------------------------
    # Bounds
    # ------------------------------------------------------------------

    def pinsker_bounds(
        self, p: Sequence[float], q: Sequence[float], cfg: Optional[EntropyConfig] = None
    ) -> Tuple[float, float]:
        """(2 eps t^2, 4 eps t^2 / q_min) with eps = log e in the configured base."""
        t = self.operators.prob_trace_distance(p, q)
        eps = self._cfg(cfg).unit_constant
        lower = 2.0 * eps * t * t
        if t == 0.0:
            return 0.0, 0.0
        q_min = float(np.min(q))
        upper = math.inf if q_min <= 0.0 else 4.0 * eps * t * t / q_min
        return lower, upper

    def trace_distance_contraction(
        self,
        relation: LinearRelation,
        n: Povm,
        m: Povm,
        rho: DensityMatrix,
        sigma: DensityMatrix,
    ) -> Tuple[float, float]:
        """(t_N, ||alpha|| t_M); the first never exceeds the second."""
        t_n = self.operators.prob_trace_distance(
            self.povms.measure(n, rho).probs, self.povms.measure(n, sigma).probs
        )
        t_m = self.operators.prob_trace_distance(
            self.povms.measure(m, rho).probs, self.povms.measure(m, sigma).probs
        )
        return t_n, relation.entry_l1_norm * t_m

    # ------------------------------------------------------------------
    # Curve derivatives at the maximally mixed state
    # ------------------------------------------------------------------

    def _curve_moments(self, m: Povm, x: HermitianOperator) -> Tuple[np.ndarray, np.ndarray]:
        if m.dim != x.dim:
            raise DimensionMismatchError(m.dim, x.dim, "POVM and direction")
        volumes = m.volumes
        live = volumes > self.tol.trace
        overlaps = np.einsum("kij,ji->k", m.elements[live], x.matrix).real
        return volumes[live], overlaps / volumes[live]

    def curve_derivative_closed(self, m: Povm, x: TracelessHermitian, n: int) -> float:
        """
        n-th derivative (nats) of D_M(1/d + tX || 1/d) at t = 0:
        (-1)^n (n-2)! d^(n-1) sum_i tr(M_i) m_i^n with m_i = tr(M_i X)/tr(M_i).
        """
        if n < 2:
            raise InvalidParameterError(f"The closed form needs n >= 2, got {n}")
        volumes, moments = self._curve_moments(m, x)
        d = m.dim
        return float((-1) ** n * math.factorial(n - 2) * d ** (n - 1) * np.sum(volumes * moments ** n))

    def curve_derivative_numeric(
        self,
        m: Povm,
        x: TracelessHermitian,
        n: int,
        h: Optional[float] = None,
        richardson: bool = True,
    ) -> float:
        """Central finite-difference estimate of the same derivative, in nats."""
        if n not in _STENCILS:
            raise InvalidParameterError(f"Numeric derivatives support n in 1..4, got {n}")
        x_norm = self.operators.operator_norm(x)
        if x_norm == 0.0:
            return 0.0
        h = 1e-3 / x_norm if h is None else h
        if h <= 0:
            raise InvalidParameterError(f"Step must be positive, got {h}")

        d = m.dim
        offsets, weights = _STENCILS[n]
        reach = max(abs(o) for o in offsets) * h
        spectrum = np.linalg.eigvalsh(x.matrix)
        if 1.0 / d - reach * max(abs(spectrum[0]), abs(spectrum[-1])) < -self.tol.psd:
            raise StencilOutsideStateSpaceError(
                f"1/d + tX leaves the state space for |t| <= {reach:.3e}; use a smaller step"
            )

        volumes, moments = self._curve_moments(m, x)
        base = volumes / d

        def curve(t: float) -> float:
            u = t * d * moments
            grown = 1.0 + u
            return float(np.sum(base * np.where(grown > 0, grown * np.log1p(np.maximum(u, -1.0 + 1e-300)), 0.0)))

        def estimate(step: float) -> float:
            total = sum(w * curve(o * step) for o, w in zip(offsets, weights))
            return total / step ** n

        coarse = estimate(h)
        if not richardson:
            return coarse
        fine = estimate(h / 2.0)
        return (4.0 * fine - coarse) / 3.0


def create_entropy_service(
    tolerances: Optional[Tolerances] = None,
    povms: Optional[PovmService] = None,
    cfg: Optional[EntropyConfig] = None,
) -> EntropyService:
    """Factory function to create an entropy service."""
    return EntropyService(tolerances, povms, cfg)


# Singleton instance
entropy_service = create_entropy_service()
