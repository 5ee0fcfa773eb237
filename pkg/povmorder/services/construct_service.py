"""
Construct Service - generators for example families, separation parameters and
random POVMs used by the property suites.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from povmorder.config import Tolerances, settings
from povmorder.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    LinearlyDependentError,
    NoLinearRelationError,
    ShapeMismatchError,
    SingularMapError,
)
from povmorder.models import (
    ConstructedPair,
    HermitianOperator,
    LinearRelation,
    Povm,
    SeparationParameters,
    StochasticMap,
)
from povmorder.services.order_service import OrderService, create_order_service

logger = logging.getLogger(__name__)


class ConstructService:
    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        orders: Optional[OrderService] = None,
    ):
        self.tol = tolerances or settings.tolerances()
        self.orders = orders or create_order_service(self.tol)

    @property
    def povms(self):
        return self.orders.povms

    @property
    def operators(self):
        return self.orders.operators

    # ==================== Post-processing ====================

    def postprocess(self, m: Povm, lam: StochasticMap) -> Povm:
        """N_j = sum_i Lambda_{j|i} M_i."""
        if lam.shape[1] != m.count:
            raise ShapeMismatchError(f"Map has {lam.shape[1]} columns for {m.count} POVM elements")
        return Povm(np.einsum("ji,ikl->jkl", lam.matrix, m.elements))

    def invertible_stochastic_pair(
        self, n: Povm, lam: StochasticMap, eps: Optional[float] = None
    ) -> ConstructedPair:
        """
        M = postprocess(N, Lambda) for square invertible Lambda. Then
        N_j = sum_i alpha_ji M_i with alpha = Lambda^-1, and N is itself a
        post-processing of M exactly when alpha is stochastic.
        """
        rows, cols = lam.shape
        if rows != cols:
            raise ShapeMismatchError(f"Map must be square, got {lam.shape}")
        if abs(np.linalg.det(lam.matrix)) <= self.tol.span:
            raise SingularMapError("Stochastic map is singular")
        if not self.povms.is_linearly_independent(n):
            raise LinearlyDependentError("N must be linearly independent")

        m = self.postprocess(n, lam)
        alpha = np.linalg.inv(lam.matrix)
        coords_m = self.operators.hermitian_coordinates(m.elements)
        coords_n = self.operators.hermitian_coordinates(n.elements)
        residual = float(np.max(np.linalg.norm(alpha @ coords_m - coords_n, axis=1)))
        relation = LinearRelation(alpha=alpha, max_residual=residual)
        return ConstructedPair(
            n=n,
            m=m,
            lambda_map=lam,
            alpha=relation,
            alpha_is_stochastic=relation.is_stochastic,
            eps=eps,
        )

    def binary_epsilon_mix(
        self, a: HermitianOperator, b: HermitianOperator, eps: float
    ) -> ConstructedPair:
        """N = (A, B) and M = ((1 - 2 eps) A + eps 1, (1 - 2 eps) B + eps 1)."""
        if not 0.0 < eps < 0.5:
            raise InvalidParameterError(f"eps must lie in (0, 1/2), got {eps}")
        if a.dim != b.dim:
            raise DimensionMismatchError(a.dim, b.dim, "binary POVM elements")
        n = self.povms.require_valid(Povm.from_operators([a, b]))
        return self.invertible_stochastic_pair(n, StochasticMap.binary_flip(eps), eps=eps)

    # ==================== Identity mixing ====================

    def separation_parameters(self, n: Povm, m: Povm) -> SeparationParameters:
        """beta, v and ||alpha|| of the relation N -> M with the weights lambda', lambda''."""
        relation = self.orders.decide_linear(n, m)
        if relation is None:
            raise NoLinearRelationError("span(N) is not contained in span(M)")
        if not self.povms.is_linearly_independent(m):
            raise LinearlyDependentError("M must be linearly independent for a unique alpha")

        d = n.dim
        alpha_norm = relation.entry_l1_norm
        beta = max(0.0, float(np.min(self.operators.min_eigenvalues(n.elements))))
        vol_min = max(0.0, float(np.min(n.volumes)))
        denom = 2.0 * alpha_norm ** 2
        return SeparationParameters(
            dim=d,
            alpha_norm=alpha_norm,
            beta=beta,
            vol_min=vol_min,
            lambda_prime=beta / denom,
            lambda_double_prime=(vol_min / d) / denom,
        )

    def build_n_lambda(self, n: Povm, lam: float) -> Povm:
        """lam N (+) (1 - lam) 1, identity element last."""
        return self.povms.disjoint_convex(lam, n, self.povms.trivial(n.dim), tags=("n", "id"))

    # ==================== Random families ====================

    def random_povm(self, dim: int, count: int, seed: int = 0) -> Povm:
        """S^-1/2 G_k S^-1/2 with G_k Wishart and S = sum_k G_k."""
        if count < 1:
            raise InvalidParameterError(f"Need at least one outcome, got {count}")
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
        wishart = g @ np.conj(np.swapaxes(g, -1, -2))
        vals, vecs = np.linalg.eigh(wishart.sum(axis=0))
        inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
        elements = inv_sqrt @ wishart @ inv_sqrt
        return Povm(0.5 * (elements + np.conj(np.swapaxes(elements, -1, -2))))

    def random_projective_povm(
        self, dim: int, seed: int = 0, ranks: Optional[Sequence[int]] = None
    ) -> Povm:
        """Haar-rotated projectors of the given ranks (rank one by default)."""
        ranks = list(ranks) if ranks is not None else [1] * dim
        if sum(ranks) != dim or any(r < 1 for r in ranks):
            raise InvalidParameterError(f"Ranks {ranks} must be positive and sum to {dim}")
        u = self.operators.random_unitary(dim, seed)
        bounds = np.cumsum([0] + ranks)
        elements = [
            u[:, lo:hi] @ u[:, lo:hi].conj().T for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        return Povm(np.stack(elements))

    def random_stochastic_map(self, k_out: int, k_in: int, seed: int = 0) -> StochasticMap:
        rng = np.random.default_rng(seed)
        return StochasticMap(rng.dirichlet(np.ones(k_out), size=k_in).T)

    def equivalent_variant(self, m: Povm, seed: int = 0) -> Povm:
        """Split one element, append a zero element and shuffle: equivalent to `m`."""
        rng = np.random.default_rng(seed)
        weight = float(rng.uniform(0.2, 0.8))
        variant = self.povms.split_element(m, int(rng.integers(m.count)), [weight, 1.0 - weight])
        variant = self.povms.append_zero(variant)
        return self.povms.permute(variant, rng.permutation(variant.count))

    def perturbed_variant(self, m: Povm, seed: int = 0, strength: float = 0.1) -> Povm:
        """
        Blend two elements of `m`. The result is a post-processing of `m` but, for
        linearly independent `m`, not equivalent to it.
        """
        if m.count < 2:
            raise InvalidParameterError("Need at least two elements to blend")
        if not 0.0 < strength < 0.5:
            raise InvalidParameterError(f"strength must lie in (0, 1/2), got {strength}")
        rng = np.random.default_rng(seed)
        i, j = rng.choice(m.count, size=2, replace=False)
        lam = np.eye(m.count)
        lam[i, i] = lam[j, j] = 1.0 - strength
        lam[i, j] = lam[j, i] = strength
        return self.postprocess(m, StochasticMap(lam))


def create_construct_service(
    tolerances: Optional[Tolerances] = None, orders: Optional[OrderService] = None
) -> ConstructService:
    """Factory function to create a construct service."""
    return ConstructService(tolerances, orders)


# Singleton instance
construct_service = create_construct_service()
