"""
Relations between POVMs: linear relations, stochastic maps and constructed pairs.
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from povmorder.config import active_tolerances
from povmorder.exceptions import InvalidStochasticMapError, ShapeMismatchError
from povmorder.models.povm import Povm


@dataclass(frozen=True, eq=False)
class LinearRelation:
    """N_j = sum_i alpha[j, i] M_i, rows index N outcomes and columns index M outcomes."""

    alpha: np.ndarray
    max_residual: float = 0.0

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64)
        if alpha.ndim != 2:
            raise ShapeMismatchError(f"alpha must be a matrix, got shape {alpha.shape}")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def entry_l1_norm(self) -> float:
        """||alpha|| = sum_ji |alpha_ji|."""
        return float(np.abs(self.alpha).sum())

    @property
    def is_stochastic(self) -> bool:
        tol = active_tolerances().stoch
        return bool(
            np.all(self.alpha >= -tol) and np.allclose(self.alpha.sum(axis=0), 1.0, atol=tol, rtol=0.0)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha.tolist(),
            "entry_l1_norm": self.entry_l1_norm,
            "max_residual": self.max_residual,
        }


@dataclass(frozen=True, eq=False)
class StochasticMap:
    """Column-stochastic matrix Lambda[j, i] = Lambda_{j|i}."""

    matrix: np.ndarray

    def __post_init__(self):
        lam = np.array(self.matrix, dtype=np.float64)
        if lam.ndim != 2 or lam.size == 0:
            raise ShapeMismatchError(f"A stochastic map must be a non-empty matrix, got shape {lam.shape}")
        tol = active_tolerances().stoch
        lowest = float(lam.min())
        if lowest < -tol:
            raise InvalidStochasticMapError(f"Stochastic map has negative entry {lowest:.3e}")
        column_error = float(np.max(np.abs(lam.sum(axis=0) - 1.0)))
        if column_error > tol:
            raise InvalidStochasticMapError(
                f"Stochastic map columns must sum to 1 (max deviation {column_error:.3e})"
            )
        lam.setflags(write=False)
        object.__setattr__(self, "matrix", lam)

    @classmethod
    def identity(cls, size: int) -> "StochasticMap":
        return cls(np.eye(size))

    @classmethod
    def merge_all(cls, size: int) -> "StochasticMap":
        return cls(np.ones((1, size)))

    @classmethod
    def binary_flip(cls, eps: float) -> "StochasticMap":
        """((1 - eps, eps), (eps, 1 - eps))."""
        return cls(np.array([[1.0 - eps, eps], [eps, 1.0 - eps]]))

    @property
    def shape(self):
        return self.matrix.shape

    def to_dict(self) -> Dict[str, Any]:
        return {"matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class ConstructedPair:
    """
    A pair related both ways: M_i = sum_j lambda_map[i, j] N_j and
    N_j = sum_i alpha[j, i] M_i.
    """

    n: Povm
    m: Povm
    lambda_map: StochasticMap
    alpha: LinearRelation
    alpha_is_stochastic: bool
    eps: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda_map": self.lambda_map.to_dict(),
            "alpha": self.alpha.to_dict(),
            "alpha_is_stochastic": self.alpha_is_stochastic,
            "eps": self.eps,
        }
