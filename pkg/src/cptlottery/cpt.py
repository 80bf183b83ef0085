"""Core prospect-theory primitives: power value function, inverse-S
probability weighting, rank-dependent decision weights, and the expected
utility of an arbitrary prospect."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CptParams:
    """Behavioral constants of a homogeneous buyer population.

    alpha / beta are the gain / loss curvature exponents, lam the loss
    aversion multiplier, gamma_plus / gamma_minus the weighting-function
    curvatures on the gain / loss side.
    """

    alpha: float
    beta: float
    lam: float
    gamma_plus: float
    gamma_minus: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not (0.0 < self.gamma_plus <= 1.0):
            raise ValueError(f"gamma_plus must lie in (0, 1], got {self.gamma_plus}")
        if not (0.0 < self.gamma_minus <= 1.0):
            raise ValueError(f"gamma_minus must lie in (0, 1], got {self.gamma_minus}")

    @property
    def balpha(self) -> float:
        """Reciprocal gain exponent 1/alpha (> 1)."""
        return 1.0 / self.alpha

    @property
    def bbeta(self) -> float:
        """Reciprocal loss exponent 1/beta (> 1)."""
        return 1.0 / self.beta


def value(params: CptParams, w) -> float:
    """Subjective value of a monetary outcome: w**alpha for gains,
    -lam*(-w)**beta for losses.  Zero counts as a gain."""
    w = float(w)
    if not math.isfinite(w):
        raise ValueError(f"outcome must be finite, got {w}")
    if w >= 0.0:
        return w ** params.alpha
    return -params.lam * (-w) ** params.beta


def value_inverse(params: CptParams, u) -> float:
    """Outcome whose subjective value is u (exact inverse of ``value``)."""
    u = float(u)
    if not math.isfinite(u):
        raise ValueError(f"utility must be finite, got {u}")
    if u >= 0.0:
        return u ** params.balpha
    return -((-u / params.lam) ** params.bbeta)


def weight(gamma: float, p) -> float:
    """Inverse-S probability weighting  p**g / (p**g + (1-p)**g)**(1/g).

    Maps 0 to 0 and 1 to 1 exactly; gamma = 1 is the identity.
    """
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if gamma == 1.0:
        return p
    a = p ** gamma
    b = (1.0 - p) ** gamma
    return a / (a + b) ** (1.0 / gamma)


def weight_array(gamma: float, p: np.ndarray) -> np.ndarray:
    """Vectorized ``weight`` over an array of probabilities."""
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    p = np.asarray(p, dtype=np.float64)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    if gamma == 1.0:
        return p.copy()
    a = p ** gamma
    b = (1.0 - p) ** gamma
    out = a / (a + b) ** (1.0 / gamma)
    # endpoints are exact by construction (0/1 -> 0, 1/1 -> 1)
    return out


def value_array(params: CptParams, w: np.ndarray) -> np.ndarray:
    """Vectorized ``value`` over an array of outcomes."""
    w = np.asarray(w, dtype=np.float64)
    out = np.empty_like(w)
    gain = w >= 0.0
    out[gain] = w[gain] ** params.alpha
    out[~gain] = -params.lam * (-w[~gain]) ** params.beta
    return out


@dataclass(frozen=True)
class Prospect:
    """A finite prospect: outcomes sorted nondecreasing with their
    probabilities, split into n_minus nonpositive and the rest nonnegative."""

    outcomes: np.ndarray
    probabilities: np.ndarray
    n_minus: int

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=np.float64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probabilities", probs)
        if outcomes.ndim != 1 or probs.shape != outcomes.shape:
            raise ValueError("outcomes and probabilities must be equal-length vectors")
        if outcomes.size == 0:
            raise ValueError("prospect must have at least one outcome")
        if not np.all(np.isfinite(outcomes)):
            raise ValueError("outcomes must be finite")
        if np.any(np.diff(outcomes) < 0.0):
            raise ValueError("outcomes must be sorted nondecreasing")
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {probs.sum()!r}")
        m = self.n_minus
        if not (0 <= m <= outcomes.size):
            raise ValueError(f"n_minus out of range: {m}")
        if m > 0 and outcomes[m - 1] > 0.0:
            raise ValueError("the first n_minus outcomes must be nonpositive")
        if m < outcomes.size and outcomes[m] < 0.0:
            raise ValueError("outcomes beyond n_minus must be nonnegative")

    @classmethod
    def from_outcomes(cls, outcomes, probabilities) -> "Prospect":
        """Build a prospect, counting strictly negative outcomes as losses
        (zeros go to the gain side)."""
        outcomes = np.asarray(outcomes, dtype=np.float64)
        order = np.argsort(outcomes, kind="stable")
        outcomes = outcomes[order]
        probs = np.asarray(probabilities, dtype=np.float64)[order]
        n_minus = int(np.searchsorted(outcomes, 0.0, side="left"))
        return cls(outcomes, probs, n_minus)

    @property
    def n(self) -> int:
        return self.outcomes.size

    @property
    def n_plus(self) -> int:
        return self.outcomes.size - self.n_minus


@dataclass(frozen=True)
class DecisionWeights:
    """Rank- and sign-dependent decision weights of a prospect."""

    h_minus: np.ndarray
    h_plus: np.ndarray


def decision_weights(params: CptParams, prospect: Prospect) -> DecisionWeights:
    """Decision weights as differences of the weighting function evaluated
    at cumulative probabilities: losses cumulate from the worst outcome up,
    gains from the best outcome down."""
    p = prospect.probabilities
    m = prospect.n_minus
    # losses: W-(p1+...+pi) - W-(p1+...+p_{i-1})
    cum_lo = np.concatenate(([0.0], np.cumsum(p[:m])))
    w_lo = weight_array(params.gamma_minus, np.clip(cum_lo, 0.0, 1.0))
    h_minus = np.diff(w_lo)
    # gains: W+(pj+...+pN) - W+(p_{j+1}+...+pN), suffix sums over the gain block
    tail = p[m:][::-1]
    cum_hi = np.concatenate(([0.0], np.cumsum(tail)))[::-1]
    w_hi = weight_array(params.gamma_plus, np.clip(cum_hi, 0.0, 1.0))
    h_plus = w_hi[:-1] - w_hi[1:]
    return DecisionWeights(h_minus=h_minus, h_plus=h_plus)


def expected_utility(params: CptParams, prospect: Prospect) -> float:
    """CPT expected utility: decision-weighted sum of outcome values."""
    dw = decision_weights(params, prospect)
    m = prospect.n_minus
    u = value_array(params, prospect.outcomes)
    return float(dw.h_minus @ u[:m] + dw.h_plus @ u[m:])


def expected_utility_grouped(params: CptParams, levels, counts) -> float:
    """Expected utility of a lottery given as distinct outcome levels with
    ticket counts (uniform probability per ticket).

    Equivalent to expanding each level into ``count`` equal outcomes and
    calling ``expected_utility``; decision weights telescope across a block
    of equal outcomes, so only level boundaries matter.
    """
    levels = np.asarray(levels, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    if levels.shape != counts.shape or levels.ndim != 1:
        raise ValueError("levels and counts must be equal-length vectors")
    if np.any(counts <= 0):
        raise ValueError("counts must be positive")
    order = np.argsort(levels, kind="stable")
    levels = levels[order]
    counts = counts[order]
    n = int(counts.sum())
    m = int(np.searchsorted(levels, 0.0, side="left"))  # zero evaluates to 0 either way
    u = value_array(params, levels)
    eu = 0.0
    # loss side: cumulative ticket counts from the worst outcome
    cum = np.concatenate(([0], np.cumsum(counts[:m])))
    w = weight_array(params.gamma_minus, cum / n)
    eu += float(np.diff(w) @ u[:m])
    # gain side: cumulative ticket counts from the best outcome
    cum = np.concatenate(([0], np.cumsum(counts[m:][::-1])))
    w = weight_array(params.gamma_plus, cum / n)
    eu += float(np.diff(w) @ u[m:][::-1])
    return eu
