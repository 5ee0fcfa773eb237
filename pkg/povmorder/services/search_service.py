"""
Search Service - seeded falsification search for entropic ordering witnesses.

Structured candidates are evaluated first, then random samples in fixed-size
chunks. Chunk c draws from a generator seeded by (seed, c), so results do not
depend on how chunks are scheduled across workers. When nothing beats the
acceptance margin, the best sample is refined by random-direction hill climbing.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from povmorder.config import Tolerances, settings
from povmorder.models import BudgetUsage, Povm, SearchBudget
from povmorder.services.entropy_service import EntropyService, create_entropy_service

logger = logging.getLogger(__name__)


class SearchKind(str, Enum):
    ENTROPY = "entropy"
    RELENT = "relent"


@dataclass
class SearchJob:
    """Outcome of one falsification search."""

    kind: SearchKind
    margin: float = -math.inf
    index: Optional[int] = None
    rho: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    source: str = "none"
    candidates: int = 0
    samples: int = 0
    refine_steps: int = 0
    chunk_best: List[float] = field(default_factory=list)

    def found(self, tol_margin: float) -> bool:
        return self.rho is not None and self.margin > tol_margin

    def usage(self) -> BudgetUsage:
        return BudgetUsage(candidates=self.candidates, samples=self.samples, refine_steps=self.refine_steps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "margin": self.margin,
            "index": self.index,
            "source": self.source,
            "candidates": self.candidates,
            "samples": self.samples,
            "refine_steps": self.refine_steps,
        }


def _pick_winner(margins: np.ndarray, tol_margin: float) -> Optional[int]:
    """Smallest index whose margin is within tol_margin of the best."""
    if margins.size == 0:
        return None
    finite_or_inf = np.where(np.isnan(margins), -np.inf, margins)
    best = float(np.max(finite_or_inf))
    if best == -math.inf:
        return None
    if best == math.inf:
        return int(np.flatnonzero(finite_or_inf == math.inf)[0])
    return int(np.flatnonzero(finite_or_inf >= best - tol_margin)[0])


class SearchService:
    """
    Seeded sampling over states (entropy order) or state pairs (relent order).
    Margins are violation sizes; larger is a stronger witness.
    """

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        entropies: Optional[EntropyService] = None,
    ):
        self.tol = tolerances or settings.tolerances()
        self.entropies = entropies or create_entropy_service(self.tol)

    @property
    def operators(self):
        return self.entropies.operators

    # ------------------------------------------------------------------
    # Margins
    # ------------------------------------------------------------------

    def entropy_margins(self, n: Povm, m: Povm, rhos: np.ndarray) -> np.ndarray:
        """S_M(rho) - S_N(rho): positive where S_N >= S_M fails."""
        return self.entropies.observational_entropy_batch(m, rhos) - self.entropies.observational_entropy_batch(n, rhos)

    def relent_margins(self, n: Povm, m: Povm, rhos: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
        """D_N(rho||sigma) - D_M(rho||sigma); -inf wherever D_M is infinite."""
        d_n = self.entropies.relative_entropy_batch(n, rhos, sigmas)
        d_m = self.entropies.relative_entropy_batch(m, rhos, sigmas)
        with np.errstate(invalid="ignore"):
            gap = d_n - d_m
        return np.where(np.isinf(d_m), -np.inf, gap)

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def _draw_chunk(
        self, kind: SearchKind, dim: int, seed: int, chunk: int, count: int
    ) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        rng = np.random.default_rng([seed, chunk])
        ops = self.operators
        third = count // 3
        if kind == SearchKind.ENTROPY:
            rhos = np.concatenate([
                ops.random_density_batch(rng, dim, third, "pure"),
                ops.random_density_batch(rng, dim, third, "hilbert-schmidt"),
                ops.random_near_mixed_batch(rng, dim, count - 2 * third),
            ])
            return rhos, None
        quarter = count // 4
        sizes = (quarter, quarter, quarter, count - 3 * quarter)
        # last slice pairs entropy-style states with 1/d: S_M - S_N = D_N(rho||1/d) - D_M(rho||1/d)
        rhos = np.concatenate([
            ops.random_density_batch(rng, dim, sizes[0], "pure"),
            ops.random_density_batch(rng, dim, sizes[1], "hilbert-schmidt"),
            ops.random_density_batch(rng, dim, sizes[2], "pure"),
            ops.random_near_mixed_batch(rng, dim, sizes[3]),
        ])
        sigmas = np.concatenate([
            ops.random_density_batch(rng, dim, sizes[0], "pure"),
            ops.random_density_batch(rng, dim, sizes[1], "hilbert-schmidt"),
            ops.random_density_batch(rng, dim, sizes[2], "hilbert-schmidt"),
            np.broadcast_to(np.eye(dim, dtype=np.complex128) / dim, (sizes[3], dim, dim)),
        ])
        return rhos, sigmas

    def _margins(self, kind: SearchKind, n: Povm, m: Povm, rhos: np.ndarray, sigmas: Optional[np.ndarray]) -> np.ndarray:
        if kind == SearchKind.ENTROPY:
            return self.entropy_margins(n, m, rhos)
        return self.relent_margins(n, m, rhos, sigmas)

    def run(
        self,
        kind: SearchKind,
        n: Povm,
        m: Povm,
        budget: SearchBudget,
        candidates: Optional[np.ndarray] = None,
        candidate_sigmas: Optional[np.ndarray] = None,
        candidate_sources: Optional[List[str]] = None,
    ) -> SearchJob:
        """
        Search for a state (or pair) violating the ordering of `n` against `m`.

        Args:
            kind: which ordering is being falsified
            n, m: the coarser-claimed and finer-claimed POVMs
            budget: random sample count, chunking, workers, refinement steps and seed
            candidates: structured states evaluated before random sampling
            candidate_sigmas: partner states for relent candidates
            candidate_sources: provenance label of each candidate

        Returns:
            SearchJob holding the best sample; check `found()` before using it
        """
        job = SearchJob(kind=kind)
        dim = m.dim

        if candidates is not None and len(candidates):
            margins = self._margins(kind, n, m, candidates, candidate_sigmas)
            job.candidates = len(candidates)
            winner = _pick_winner(margins, self.tol.margin)
            if winner is not None:
                job.margin = float(margins[winner])
                job.index = winner
                job.rho = candidates[winner]
                job.sigma = None if candidate_sigmas is None else candidate_sigmas[winner]
                job.source = candidate_sources[winner] if candidate_sources else "candidate"
            if job.found(self.tol.margin):
                logger.debug(f"{kind.value} witness from structured candidate {winner} (margin {job.margin:.6g})")
                return job

        self._sample(kind, n, m, budget, job, dim)
        if not job.found(self.tol.margin) and job.rho is not None and budget.refine_steps > 0:
            self._refine(kind, n, m, budget, job)
        return job

    def _sample(self, kind: SearchKind, n: Povm, m: Povm, budget: SearchBudget, job: SearchJob, dim: int):
        if budget.samples <= 0:
            return
        chunk_count = math.ceil(budget.samples / budget.chunk_size)
        sizes = [min(budget.chunk_size, budget.samples - c * budget.chunk_size) for c in range(chunk_count)]

        def evaluate(chunk: int) -> np.ndarray:
            rhos, sigmas = self._draw_chunk(kind, dim, budget.seed, chunk, sizes[chunk])
            return self._margins(kind, n, m, rhos, sigmas)

        # Process chunks (in parallel when more than one worker is configured)
        if budget.workers > 1:
            with ThreadPoolExecutor(max_workers=budget.workers) as pool:
                per_chunk = list(pool.map(evaluate, range(chunk_count)))
        else:
            per_chunk = [evaluate(c) for c in range(chunk_count)]

        margins = np.concatenate(per_chunk)
        job.samples = int(margins.size)
        job.chunk_best = [float(np.max(chunk)) for chunk in per_chunk]
        winner = _pick_winner(margins, self.tol.margin)
        if winner is None or margins[winner] <= job.margin + self.tol.margin:
            return

        chunk, offset = divmod(winner, budget.chunk_size)
        rhos, sigmas = self._draw_chunk(kind, dim, budget.seed, chunk, sizes[chunk])
        job.margin = float(margins[winner])
        job.index = job.candidates + winner
        job.rho = rhos[offset]
        job.sigma = None if sigmas is None else sigmas[offset]
        job.source = "random-search"
        logger.debug(f"{kind.value} search: best margin {job.margin:.6g} at sample {winner} of {job.samples}")

    def _refine(self, kind: SearchKind, n: Povm, m: Povm, budget: SearchBudget, job: SearchJob):
        """Hill climbing on rho = A A^dagger / tr (and likewise sigma) from the best sample."""
        chunk_count = math.ceil(budget.samples / budget.chunk_size) if budget.samples else 0
        rng = np.random.default_rng([budget.seed, chunk_count])

        def factor(state: np.ndarray) -> np.ndarray:
            vals, vecs = np.linalg.eigh(state)
            return vecs * np.sqrt(np.clip(vals, 0.0, None))

        def state(a: np.ndarray) -> np.ndarray:
            rho = a @ a.conj().T
            return rho / np.trace(rho).real

        factors = [factor(job.rho)] + ([factor(job.sigma)] if job.sigma is not None else [])
        step = 0.1
        best = job.margin
        dim = job.rho.shape[0]
        for _ in range(budget.refine_steps):
            trial = [
                a + step * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2 * dim)
                for a in factors
            ]
            rhos = state(trial[0])[np.newaxis]
            sigmas = state(trial[1])[np.newaxis] if len(trial) > 1 else None
            value = float(self._margins(kind, n, m, rhos, sigmas)[0])
            job.refine_steps += 1
            if value > best:
                best, factors = value, trial
                step *= 1.2
            else:
                step *= 0.7
            if best == math.inf:
                break

        if best > job.margin:
            job.margin = best
            job.rho = state(factors[0])
            job.sigma = state(factors[1]) if len(factors) > 1 else None
            job.source = "refined-search"
            logger.debug(f"{kind.value} refinement raised the margin to {best:.6g}")


def create_search_service(
    tolerances: Optional[Tolerances] = None, entropies: Optional[EntropyService] = None
) -> SearchService:
    """Factory function to create a search service."""
    return SearchService(tolerances, entropies)


# Singleton instance
search_service = create_search_service()
