"""
Order Service - decision procedures for the four POVM orderings.

For a pair (N, M) the orderings, from strongest to weakest, are:
    stochastic   N_j = sum_i Lambda_{j|i} M_i with Lambda column-stochastic
    relent       D_N(rho||sigma) <= D_M(rho||sigma) for all states
    entropy      S_N(rho) >= S_M(rho) for all states
    linear       span(N) inside span(M)
Each holds whenever the one above it does. The two entropic orders get
three-valued verdicts: `holds` comes with a certificate, `refuted` with a witness,
and `unknown` records the search budget that was spent.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from povmorder.config import Tolerances, settings
from povmorder.exceptions import (
    DimensionMismatchError,
    InconsistentClassificationError,
    ResamplingExhaustedError,
)
from povmorder.models import (
    PROJECTIVE_SHORTCUT,
    BudgetUsage,
    CanonicalForm,
    Certificate,
    CertificateKind,
    DensityMatrix,
    DirectionClassification,
    LinearRelation,
    LinearRelationSummary,
    OrderRelation,
    OrderVerdict,
    PairClassification,
    Povm,
    SearchBudget,
    StateSchema,
    StochasticMap,
    VerdictStatus,
    Witness,
)
from povmorder.services.search_service import SearchJob, SearchKind, SearchService, create_search_service

logger = logging.getLogger(__name__)

# Relative slack on the identity-mixing bound so that exact boundary cases certify.
_BOUND_SLACK = 1e-9
_RESAMPLING_LIMIT = 100


@dataclass
class StochasticDecision:
    """Result of the post-processing feasibility program."""

    feasible: bool
    margin: float
    stochastic_map: Optional[StochasticMap] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feasible": self.feasible,
            "margin": self.margin,
            "stochastic_map": self.stochastic_map.matrix.tolist() if self.stochastic_map else None,
        }


@dataclass
class _DirectionFacts:
    """Exact-side facts shared by both entropic pipelines for one direction."""

    stochastic: StochasticDecision
    linear: Optional[LinearRelation]
    linear_residual: float
    coarser_projective: bool
    finer_projective: bool


class OrderService:
    """Decides orderings of `n` (claimed coarser) against `m` (claimed finer)."""

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        search: Optional[SearchService] = None,
    ):
        self.tol = tolerances or settings.tolerances()
        self.search = search or create_search_service(self.tol)

    @property
    def entropies(self):
        return self.search.entropies

    @property
    def povms(self):
        return self.entropies.povms

    @property
    def operators(self):
        return self.entropies.operators

    @staticmethod
    def _same_dim(n: Povm, m: Povm):
        if n.dim != m.dim:
            raise DimensionMismatchError(n.dim, m.dim, "POVMs")

    # ==================== Linear relation ====================

    def span_residual(self, n: Povm, m: Povm) -> float:
        """max_j ||N_j - proj_span(M) N_j|| / ||N_j||."""
        self._same_dim(n, m)
        basis = self.operators.orthonormalize(list(m.elements), self.tol.span)
        worst = 0.0
        for element in n.elements:
            norm = self.operators.hs_norm(element)
            if norm == 0.0:
                continue
            _, residual = self.operators.project_residual(element, basis)
            worst = max(worst, residual / norm)
        return worst

    def decide_linear(self, n: Povm, m: Povm) -> Optional[LinearRelation]:
        """alpha with N_j = sum_i alpha_ji M_i when span(N) lies in span(M), else None."""
        if self.span_residual(n, m) > self.tol.span:
            return None
        coords_m = self.operators.hermitian_coordinates(m.elements)
        coords_n = self.operators.hermitian_coordinates(n.elements)
        solution, *_ = np.linalg.lstsq(coords_m.T, coords_n.T, rcond=self.tol.span)
        alpha = solution.T
        reconstructed = alpha @ coords_m
        max_residual = float(np.max(np.linalg.norm(reconstructed - coords_n, axis=1)))
        return LinearRelation(alpha=alpha, max_residual=max_residual)

    # ==================== Stochastic post-processing ====================

    def decide_stochastic(self, n: Povm, m: Povm) -> StochasticDecision:
        """
        Feasibility of Lambda >= 0, columns summing to 1, sum_i Lambda_ji M_i = N_j.

        Solved as one LP minimizing the infinity-norm violation s of the equality
        constraints, so an infeasible pair reports its minimal violation as margin.
        """
        self._same_dim(n, m)
        k_n, k_m = n.count, m.count
        coords_m = self.operators.hermitian_coordinates(m.elements)  # (k_m, D)
        coords_n = self.operators.hermitian_coordinates(n.elements)  # (k_n, D)
        dim_coords = coords_m.shape[1]

        # x[j * k_m + i] = Lambda_{j|i}
        columns = np.kron(np.ones((1, k_n)), np.eye(k_m))
        operators = np.kron(np.eye(k_n), coords_m.T)
        a_eq = np.vstack([columns, operators])
        b_eq = np.concatenate([np.ones(k_m), coords_n.reshape(k_n * dim_coords)])

        rows = a_eq.shape[0]
        slack = -np.ones((rows, 1))
        a_ub = np.vstack([np.hstack([a_eq, slack]), np.hstack([-a_eq, slack])])
        b_ub = np.concatenate([b_eq, -b_eq])
        cost = np.zeros(k_n * k_m + 1)
        cost[-1] = 1.0

        result = linprog(
            cost,
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=(0, None),
            method="highs",
            options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
        )
        if result.status != 0 or result.x is None:
            logger.warning(f"Feasibility LP did not solve cleanly: {result.message}")
            return StochasticDecision(feasible=False, margin=math.inf)

        x = result.x[:-1]
        margin = float(np.max(np.abs(a_eq @ x - b_eq)))
        logger.debug(f"Feasibility LP for {k_n}x{k_m} map: minimal violation {margin:.3e}")
        if margin > self.tol.stoch:
            return StochasticDecision(feasible=False, margin=margin)

        lam = np.clip(x.reshape(k_n, k_m), 0.0, None)
        lam = lam / lam.sum(axis=0, keepdims=True)
        return StochasticDecision(feasible=True, margin=margin, stochastic_map=StochasticMap(lam))

    # ==================== Equivalence ====================

    def _match_atoms(self, left: CanonicalForm, right: CanonicalForm) -> Optional[List[int]]:
        """Greedy bijection left atom -> right atom (direction and volume), or None."""
        if len(left) != len(right):
            return None
        unused = list(range(len(right)))
        mapping: List[int] = []
        for atom in left.atoms:
            for pos, candidate in enumerate(unused):
                other = right.atoms[candidate]
                cos = np.vdot(atom.mu, other.mu).real / (np.linalg.norm(atom.mu) * np.linalg.norm(other.mu))
                if 1.0 - cos <= self.tol.prop and abs(atom.volume - other.volume) <= self.tol.vol:
                    mapping.append(candidate)
                    del unused[pos]
                    break
            else:
                return None
        return mapping

    def decide_equivalence(self, n: Povm, m: Povm) -> bool:
        self._same_dim(n, m)
        return self._match_atoms(self.povms.canonical_form(n), self.povms.canonical_form(m)) is not None

    def _to_intermediary(self, povm: Povm, form: CanonicalForm) -> np.ndarray:
        """Lambda_{l|i} = 1 when element i belongs to atom l; zero elements go to atom 0."""
        lam = np.zeros((len(form), povm.count))
        lam[0, :] = 1.0
        for l, atom in enumerate(form.atoms):
            for i in atom.members:
                lam[:, i] = 0.0
                lam[l, i] = 1.0
        return lam

    def _from_intermediary(self, povm: Povm, form: CanonicalForm) -> np.ndarray:
        """Lambda_{i|l} = tr(M_i) / V(mu_l) for members i of atom l."""
        lam = np.zeros((povm.count, len(form)))
        volumes = povm.volumes
        for l, atom in enumerate(form.atoms):
            for i in atom.members:
                lam[i, l] = volumes[i] / atom.volume
        return lam / lam.sum(axis=0, keepdims=True)

    def equivalence_witness_maps(
        self, n: Povm, m: Povm
    ) -> Optional[Tuple[StochasticMap, StochasticMap]]:
        """
        (Lambda_{M->N}, Lambda_{N->M}) composed through the canonical intermediary,
        or None when the pair is not equivalent.
        """
        self._same_dim(n, m)
        form_n, form_m = self.povms.canonical_form(n), self.povms.canonical_form(m)
        mapping = self._match_atoms(form_n, form_m)
        if mapping is None or not mapping:
            return None

        # Reorder M's atoms so that atom l of both forms describe the same direction.
        form_m = CanonicalForm(dim=form_m.dim, atoms=tuple(form_m.atoms[k] for k in mapping))
        m_to_n = self._from_intermediary(n, form_n) @ self._to_intermediary(m, form_m)
        n_to_m = self._from_intermediary(m, form_m) @ self._to_intermediary(n, form_n)

        for lam, source, target in ((m_to_n, m, n), (n_to_m, n, m)):
            error = float(np.max(np.abs(np.einsum("ji,ikl->jkl", lam, source.elements) - target.elements)))
            if error > self.tol.span * max(1.0, float(np.max(np.abs(target.elements)))):
                logger.warning(f"Equivalence map failed re-verification (error {error:.3e})")
                return None
        return StochasticMap(m_to_n), StochasticMap(n_to_m)

    def moment_equality_test(
        self,
        n: Povm,
        m: Povm,
        trials: Optional[int] = None,
        max_order_slack: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> bool:
        """
        Compare the volume maps of N and M through the moments
        sum_k [V_M(mu_k) - V_N(mu_k)] r_k^n with r_k = <mu_k, X> for random
        traceless X whose r_k are nonzero and pairwise distinct.
        """
        self._same_dim(n, m)
        trials = settings.MOMENT_TRIALS if trials is None else trials
        slack = settings.MOMENT_ORDER_SLACK if max_order_slack is None else max_order_slack
        seed = settings.SEED if seed is None else seed

        directions, v_m, v_n = self._merged_atoms(n, m)
        if len(directions) == 0:
            return True
        diff = v_m - v_n
        scale_weights = v_m + v_n
        orders = range(2, len(directions) + 2 + slack)

        for trial in range(trials):
            r = self._separated_overlaps(directions, m.dim, seed, trial)
            for order in orders:
                moment = float(np.sum(diff * r ** order))
                scale = float(np.sum(scale_weights * np.abs(r) ** order))
                if abs(moment) > self.tol.vol * max(scale, np.finfo(float).tiny):
                    logger.debug(f"Moment test: order {order} differs by {moment:.3e} (trial {trial})")
                    return False
        return True

    def _merged_atoms(self, n: Povm, m: Povm) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Union of both canonical forms, without the maximally mixed direction."""
        mixed = np.eye(m.dim) / m.dim
        directions: List[np.ndarray] = []
        v_m: List[float] = []
        v_n: List[float] = []

        def close(a: np.ndarray, b: np.ndarray) -> bool:
            cos = np.vdot(a, b).real / (np.linalg.norm(a) * np.linalg.norm(b))
            return 1.0 - cos <= self.tol.prop

        for form, volumes in ((self.povms.canonical_form(m), v_m), (self.povms.canonical_form(n), v_n)):
            for atom in form.atoms:
                if close(atom.mu, mixed):
                    continue
                for k, mu in enumerate(directions):
                    if close(atom.mu, mu):
                        volumes[k] += atom.volume
                        break
                else:
                    directions.append(atom.mu)
                    v_m.append(0.0)
                    v_n.append(0.0)
                    volumes[-1] += atom.volume
        return np.array(directions), np.array(v_m), np.array(v_n)

    def _separated_overlaps(self, directions: np.ndarray, dim: int, seed: int, trial: int) -> np.ndarray:
        sep = self.tol.moment_separation
        for attempt in range(_RESAMPLING_LIMIT):
            rng = np.random.default_rng([seed, trial, attempt])
            x = self.operators.random_traceless_batch(rng, dim, 1)[0]
            x = x / np.linalg.norm(x)
            r = np.einsum("kij,ji->k", directions, x).real
            gaps = np.abs(r[:, None] - r[None, :])
            np.fill_diagonal(gaps, np.inf)
            if np.min(np.abs(r)) > sep and np.min(gaps) > sep:
                return r
        raise ResamplingExhaustedError(
            f"No traceless direction separated {len(directions)} atoms after {_RESAMPLING_LIMIT} draws"
        )

    # ==================== Certificates and witnesses ====================

    def span_witness(self, n: Povm, m: Povm) -> Optional[DensityMatrix]:
        """
        sigma = (1 + eps x)/d with x the largest component of span(N) orthogonal
        to span(M). M cannot tell sigma from 1/d while N can.
        """
        self._same_dim(n, m)
        basis_m = self.operators.orthonormalize(list(m.elements), self.tol.span)
        basis_n = self.operators.orthonormalize(list(n.elements), self.tol.span)
        if not basis_n:
            return None
        residuals = [self.operators.complement_component(element, basis_m) for element in basis_n]
        norms = [float(np.linalg.norm(x)) for x in residuals]
        best = int(np.argmax(norms))
        if norms[best] <= self.tol.span:
            return None
        x = residuals[best]
        x = 0.5 * (x + x.conj().T)
        lowest = float(np.linalg.eigvalsh(x)[0])
        eps = 0.9 / abs(lowest) if lowest < 0 else 1.0
        d = m.dim
        sigma = (np.eye(d) + eps * x) / d
        return DensityMatrix(sigma / np.trace(sigma).real)

    def identity_mixing_certificate(
        self, n: Povm, m: Povm, target: OrderRelation
    ) -> Optional[Certificate]:
        """
        Recognize N = lam N' (+) (1 - lam) 1 and certify the `target` order when
        lam <= gamma / (2 ||alpha||^2), where N'_j = sum_i alpha_ji M_i and
        gamma = min_j lambda_min(N'_j) (relent) or min_j tr(N'_j)/d (entropy).
        """
        self._same_dim(n, m)
        d = n.dim
        volumes = n.volumes
        identity = np.eye(d)
        proportional = [
            k
            for k in range(n.count)
            if volumes[k] > self.tol.trace
            and np.linalg.norm(n.elements[k] - volumes[k] / d * identity)
            <= self.tol.span * max(1.0, float(np.linalg.norm(n.elements[k])))
        ]
        if len(proportional) != 1 or n.count < 2:
            return None
        k = proportional[0]
        lam = 1.0 - volumes[k] / d
        if not 0.0 < lam < 1.0:
            return None

        rest = np.delete(np.arange(n.count), k)
        inner = Povm(n.elements[rest] / lam, tuple(n.labels[i] for i in rest))
        if not self.povms.validate(inner).valid or not self.povms.is_linearly_independent(m):
            return None
        relation = self.decide_linear(inner, m)
        if relation is None:
            return None

        if target == OrderRelation.RELENT:
            gamma = float(np.min(self.operators.min_eigenvalues(inner.elements)))
        else:
            gamma = float(np.min(inner.volumes)) / d
        if gamma <= 0.0:
            return None
        alpha_norm = relation.entry_l1_norm
        bound = gamma / (2.0 * alpha_norm ** 2)
        if lam > bound * (1.0 + _BOUND_SLACK):
            logger.debug(f"Identity mixing weight {lam:.6g} exceeds the certified bound {bound:.6g}")
            return None
        logger.info(f"Identity-mixing certificate ({target.value}): lambda={lam:.6g} <= {bound:.6g}")
        return Certificate(
            kind=CertificateKind.IDENTITY_MIXING,
            lam=lam,
            gamma=gamma,
            alpha_norm=alpha_norm,
            bound=bound,
            target=target,
        )

    # ==================== Witness candidates ====================

    @staticmethod
    def _pure(vector: np.ndarray) -> np.ndarray:
        vector = vector / np.linalg.norm(vector)
        return np.outer(vector, vector.conj())

    def _projective_candidates(self, p: Povm) -> Tuple[List[np.ndarray], List[str]]:
        """P_j / tr P_j and one state sum_j c_j P_j with distinct weights c_j."""
        volumes = p.volumes
        live = np.flatnonzero(volumes > self.tol.trace)
        states = [p.elements[j] / volumes[j] for j in live]
        sources = ["projective-candidate"] * len(states)
        if len(live) > 1:
            weights = 2.0 ** -np.arange(len(live))
            mixed = np.einsum("k,kij->ij", weights, p.elements[live])
            states.append(mixed / np.trace(mixed).real)
            sources.append("projective-candidate")
        return states, sources

    def _eigen_candidates(self, *povms: Povm) -> Tuple[List[np.ndarray], List[str]]:
        """Top eigenvector of every nonzero element."""
        states: List[np.ndarray] = []
        for povm in povms:
            vals, vecs = np.linalg.eigh(povm.elements)
            for k in range(povm.count):
                if vals[k, -1] > self.tol.psd:
                    states.append(self._pure(vecs[k, :, -1]))
        return states, ["eigen-candidate"] * len(states)

    def _support_mismatch_candidates(self, n: Povm) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        """(top eigenvector, kernel vector) of every element of N with a kernel."""
        rhos, sigmas = [], []
        vals, vecs = np.linalg.eigh(n.elements)
        for k in range(n.count):
            if vals[k, 0] <= self.tol.psd < vals[k, -1]:
                rhos.append(self._pure(vecs[k, :, -1]))
                sigmas.append(self._pure(vecs[k, :, 0]))
        return rhos, sigmas

    # ==================== Verdict helpers ====================

    def _entropy_witness(self, n: Povm, m: Povm, rho: np.ndarray, source: str, index=None) -> Optional[Witness]:
        state = DensityMatrix(rho)
        s_n = self.entropies.observational_entropy(n, state)
        s_m = self.entropies.observational_entropy(m, state)
        margin = s_m - s_n
        if not margin > self.tol.margin:
            return None
        return Witness(
            rho=StateSchema.from_matrix(state), margin=margin, lhs=s_n, rhs=s_m, source=source, sample_index=index
        )

    def _relent_witness(
        self, n: Povm, m: Povm, rho: np.ndarray, sigma: np.ndarray, source: str, index=None
    ) -> Optional[Witness]:
        state, other = DensityMatrix(rho), DensityMatrix(sigma)
        d_n = self.entropies.relative_entropy(n, state, other)
        d_m = self.entropies.relative_entropy(m, state, other)
        margin = -math.inf if math.isinf(d_m) else d_n - d_m
        if not margin > self.tol.margin:
            return None
        return Witness(
            rho=StateSchema.from_matrix(state),
            sigma=StateSchema.from_matrix(other),
            margin=margin,
            lhs=d_n,
            rhs=d_m,
            source=source,
            sample_index=index,
        )

    def _facts(self, n: Povm, m: Povm) -> _DirectionFacts:
        self._same_dim(n, m)
        return _DirectionFacts(
            stochastic=self.decide_stochastic(n, m),
            linear=self.decide_linear(n, m),
            linear_residual=self.span_residual(n, m),
            coarser_projective=self.povms.is_projective(n),
            finer_projective=self.povms.is_projective(m),
        )

    def _entropy_search(self, n: Povm, m: Povm, budget: SearchBudget, facts: _DirectionFacts) -> SearchJob:
        """Structured candidates, then random states, against S_N >= S_M."""
        states, sources = [], []
        if facts.coarser_projective:
            states, sources = self._projective_candidates(n)
        eigen_states, eigen_sources = self._eigen_candidates(n, m)
        states += eigen_states
        sources += eigen_sources
        return self.search.run(
            SearchKind.ENTROPY,
            n,
            m,
            budget,
            candidates=np.array(states) if states else None,
            candidate_sources=sources,
        )

    def _stochastic_certificate(self, decision: StochasticDecision) -> Certificate:
        return Certificate(
            kind=CertificateKind.STOCHASTIC_MAP,
            stochastic_map=decision.stochastic_map.matrix.tolist(),
        )

    # ==================== Entropic orders ====================

    def decide_entropy_order(
        self,
        n: Povm,
        m: Povm,
        budget: Optional[SearchBudget] = None,
        facts: Optional[_DirectionFacts] = None,
    ) -> OrderVerdict:
        """Decide S_N(rho) >= S_M(rho) for every state rho."""
        budget = budget or SearchBudget()
        facts = facts or self._facts(n, m)
        relation = OrderRelation.ENTROPY

        if facts.stochastic.feasible:
            return OrderVerdict(
                relation=relation, status=VerdictStatus.HOLDS, certificate=self._stochastic_certificate(facts.stochastic)
            )

        if facts.linear is None:
            sigma = self.span_witness(n, m)
            if sigma is not None:
                witness = self._entropy_witness(n, m, sigma.matrix, "span-witness")
                if witness is not None:
                    return OrderVerdict(relation=relation, status=VerdictStatus.REFUTED, witness=witness)
            logger.warning("span(N) is not in span(M) but the span witness did not separate the entropies")

        certificate = self.identity_mixing_certificate(n, m, relation)
        if certificate is not None:
            return OrderVerdict(relation=relation, status=VerdictStatus.HOLDS, certificate=certificate)

        job = self._entropy_search(n, m, budget, facts)
        witness = None
        if job.found(self.tol.margin):
            witness = self._entropy_witness(n, m, job.rho, job.source, job.index)

        if facts.coarser_projective:
            return OrderVerdict(
                relation=relation,
                status=VerdictStatus.REFUTED,
                witness=witness,
                reason=PROJECTIVE_SHORTCUT,
                budget_used=job.usage(),
            )
        if witness is not None:
            return OrderVerdict(relation=relation, status=VerdictStatus.REFUTED, witness=witness, budget_used=job.usage())
        return OrderVerdict(relation=relation, status=VerdictStatus.UNKNOWN, budget_used=job.usage())

    def decide_relent_order(
        self,
        n: Povm,
        m: Povm,
        budget: Optional[SearchBudget] = None,
        facts: Optional[_DirectionFacts] = None,
    ) -> OrderVerdict:
        """Decide D_N(rho||sigma) <= D_M(rho||sigma) for every pair of states."""
        budget = budget or SearchBudget()
        facts = facts or self._facts(n, m)
        relation = OrderRelation.RELENT
        mixed = np.eye(m.dim) / m.dim

        if facts.stochastic.feasible:
            return OrderVerdict(
                relation=relation, status=VerdictStatus.HOLDS, certificate=self._stochastic_certificate(facts.stochastic)
            )

        if facts.linear is None:
            rho = self.span_witness(n, m)
            if rho is not None:
                witness = self._relent_witness(n, m, rho.matrix, mixed, "span-witness")
                if witness is not None:
                    return OrderVerdict(relation=relation, status=VerdictStatus.REFUTED, witness=witness)
            logger.warning("span(N) is not in span(M) but the span witness did not separate the divergences")

        certificate = self.identity_mixing_certificate(n, m, relation)
        if certificate is not None:
            return OrderVerdict(relation=relation, status=VerdictStatus.HOLDS, certificate=certificate)

        rhos, sigmas = self._support_mismatch_candidates(n)
        sources = ["support-mismatch"] * len(rhos)
        paired, paired_sources = ([], [])
        if facts.coarser_projective:
            paired, paired_sources = self._projective_candidates(n)
        eigen_states, eigen_sources = self._eigen_candidates(n, m)
        paired += eigen_states
        paired_sources += eigen_sources
        rhos += paired
        sigmas += [mixed] * len(paired)
        sources += paired_sources

        job = self.search.run(
            SearchKind.RELENT,
            n,
            m,
            budget,
            candidates=np.array(rhos) if rhos else None,
            candidate_sigmas=np.array(sigmas) if sigmas else None,
            candidate_sources=sources,
        )
        witness = None
        usage = job.usage()
        if job.found(self.tol.margin):
            witness = self._relent_witness(n, m, job.rho, job.sigma, job.source, job.index)

        if witness is None:
            # an entropy witness rho refutes through the pair (rho, 1/d)
            entropy_job = self._entropy_search(n, m, budget, facts)
            usage = BudgetUsage(
                candidates=usage.candidates + entropy_job.candidates,
                samples=usage.samples + entropy_job.samples,
                refine_steps=usage.refine_steps + entropy_job.refine_steps,
            )
            if entropy_job.found(self.tol.margin):
                witness = self._relent_witness(n, m, entropy_job.rho, mixed, "entropy-witness", entropy_job.index)

        if facts.coarser_projective:
            return OrderVerdict(
                relation=relation,
                status=VerdictStatus.REFUTED,
                witness=witness,
                reason=PROJECTIVE_SHORTCUT,
                budget_used=usage,
            )
        if witness is not None:
            return OrderVerdict(relation=relation, status=VerdictStatus.REFUTED, witness=witness, budget_used=usage)
        return OrderVerdict(relation=relation, status=VerdictStatus.UNKNOWN, budget_used=usage)

    # ==================== Pair classification ====================

    def _enforce_chain(
        self, n: Povm, m: Povm, facts: _DirectionFacts, relent: OrderVerdict, entropy: OrderVerdict
    ) -> Tuple[OrderVerdict, OrderVerdict]:
        """Make the verdicts agree with stochastic -> relent -> entropy -> linear."""
        if relent.holds and entropy.refuted:
            raise InconsistentClassificationError("relent order holds but the entropy order is refuted")
        if entropy.holds and facts.linear is None:
            raise InconsistentClassificationError("entropy order holds without a linear relation")

        if relent.holds and entropy.status == VerdictStatus.UNKNOWN:
            entropy = OrderVerdict(
                relation=OrderRelation.ENTROPY,
                status=VerdictStatus.HOLDS,
                certificate=Certificate(
                    kind=CertificateKind.IMPLICATION_CHAIN, derived_from=relent.certificate.kind.value
                ),
                budget_used=entropy.budget_used,
            )

        if entropy.refuted and relent.status == VerdictStatus.UNKNOWN:
            # S_M(rho) - S_N(rho) = D_N(rho||1/d) - D_M(rho||1/d)
            witness = None
            if entropy.witness is not None:
                mixed = np.eye(m.dim) / m.dim
                rho = entropy.witness.rho.to_density().matrix
                witness = self._relent_witness(n, m, rho, mixed, "entropy-witness")
            if witness is not None:
                relent = OrderVerdict(
                    relation=OrderRelation.RELENT,
                    status=VerdictStatus.REFUTED,
                    witness=witness,
                    budget_used=relent.budget_used,
                )
            elif entropy.reason == PROJECTIVE_SHORTCUT:
                relent = OrderVerdict(
                    relation=OrderRelation.RELENT,
                    status=VerdictStatus.REFUTED,
                    reason=PROJECTIVE_SHORTCUT,
                    budget_used=relent.budget_used,
                )
        return relent, entropy

    def _classify_direction(
        self, n: Povm, m: Povm, budget: SearchBudget, coarser: str, finer: str
    ) -> DirectionClassification:
        facts = self._facts(n, m)
        if facts.stochastic.feasible and facts.linear is None:
            logger.warning("Feasible post-processing without a linear relation; reporting the map as the relation")
            facts.linear = LinearRelation(alpha=facts.stochastic.stochastic_map.matrix)
        relent = self.decide_relent_order(n, m, budget, facts)
        entropy = self.decide_entropy_order(n, m, budget, facts)
        relent, entropy = self._enforce_chain(n, m, facts, relent, entropy)
        linear = facts.linear

        logger.info(
            f"{coarser} vs {finer}: stochastic={facts.stochastic.feasible} linear={linear is not None} "
            f"relent={relent.status.value} entropy={entropy.status.value}"
        )
        return DirectionClassification(
            coarser=coarser,
            finer=finer,
            linear=linear is not None,
            linear_residual=facts.linear_residual,
            linear_relation=LinearRelationSummary(**linear.to_dict()) if linear is not None else None,
            stochastic=facts.stochastic.feasible,
            stochastic_map=(
                facts.stochastic.stochastic_map.matrix.tolist() if facts.stochastic.stochastic_map else None
            ),
            stochastic_margin=facts.stochastic.margin,
            relent=relent,
            entropy=entropy,
        )

    def classify_pair(self, n: Povm, m: Povm, budget: Optional[SearchBudget] = None) -> PairClassification:
        """All four orderings in both directions plus equivalence."""
        self._same_dim(n, m)
        budget = budget or SearchBudget()
        n_vs_m = self._classify_direction(n, m, budget, "n", "m")
        m_vs_n = self._classify_direction(m, n, budget, "m", "n")
        return PairClassification(
            n_vs_m=n_vs_m,
            m_vs_n=m_vs_n,
            equivalence=self.decide_equivalence(n, m),
            projective_flags=[self.povms.is_projective(n), self.povms.is_projective(m)],
            budget=budget,
        )


def create_order_service(
    tolerances: Optional[Tolerances] = None, search: Optional[SearchService] = None
) -> OrderService:
    """Factory function to create an order service."""
    return OrderService(tolerances, search)


# Singleton instance
order_service = create_order_service()
