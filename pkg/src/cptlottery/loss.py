"""Closed-form solver for the loss-side subproblem: maximize the revenue the
seller extracts from losing tickets under a weighted utility budget.  The
optimum sits at a vertex: the first few transformed losses share one level,
the rest are zero."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpt import CptParams
from .gain import MATERIALIZE_LIMIT


def best_ell(params: CptParams, h_minus: np.ndarray) -> int:
    """Number of active loss levels maximizing ell * (sum of the first ell
    weights)**(-1/beta); ties go to the smallest index.  1-indexed."""
    h = np.asarray(h_minus, dtype=np.float64)
    if h.size == 0:
        raise ValueError("weight vector must be nonempty")
    ell = np.arange(1, h.size + 1)
    scores = ell * np.cumsum(h) ** (-params.bbeta)
    return int(np.argmax(scores)) + 1  # argmax returns the first maximizer


@dataclass(frozen=True)
class LossSolution:
    """Optimal transformed losses: ``level`` on the first ``active_count``
    entries, zero beyond."""

    active_count: int
    level: float
    n_minus: int
    values: np.ndarray | None

    def value_at(self, i: int) -> float:
        if not 1 <= i <= self.n_minus:
            raise IndexError(f"index {i} outside 1..{self.n_minus}")
        return self.level if i <= self.active_count else 0.0

    def to_array(self) -> np.ndarray:
        if self.values is not None:
            return self.values
        out = np.zeros(self.n_minus)
        out[: self.active_count] = self.level
        return out


def solve_loss(params: CptParams, h_minus: np.ndarray, v: float) -> LossSolution:
    """Exact optimum of the loss-side subproblem for weight vector h_minus
    and budget v >= 0."""
    h = np.asarray(h_minus, dtype=np.float64)
    if v < 0.0:
        raise ValueError(f"budget must be nonnegative, got {v}")
    ell = best_ell(params, h)
    level = v / float(np.sum(h[:ell]))
    values = None
    if h.size <= MATERIALIZE_LIMIT:
        values = np.zeros(h.size)
        values[:ell] = level
    return LossSolution(active_count=ell, level=level, n_minus=h.size, values=values)


def loss_value_coeff(params: CptParams, h_minus: np.ndarray, ell: int) -> float:
    """Multiplier c such that the optimal loss-side revenue equals
    c * v**(1/beta) when the first ell levels are active."""
    h = np.asarray(h_minus, dtype=np.float64)
    if not 1 <= ell <= h.size:
        raise ValueError(f"index {ell} outside 1..{h.size}")
    return ell * (params.lam * float(np.sum(h[:ell]))) ** (-params.bbeta)
