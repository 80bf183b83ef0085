"""Closed-form solver for the gain-side subproblem: minimize the seller's
total gain payout subject to ordered transformed gains meeting a weighted
utility budget.  The optimum is a uniform block followed by an increasing
tail, split at the transitional index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpt import CptParams

# y vectors above this length are served through value_at() instead of a
# materialized array
MATERIALIZE_LIMIT = 1_000_000


def transitional_index(h_plus: np.ndarray) -> int:
    """Smallest index j where the next weight reaches the running average:
    min { j : j * h[j+1] >= h[1] + ... + h[j] }, with h[m+1] treated as
    infinite so the result always exists.  1-indexed."""
    h = np.asarray(h_plus, dtype=np.float64)
    if h.size == 0:
        raise ValueError("weight vector must be nonempty")
    if h.min() < 0.0:
        raise ValueError("weights must be nonnegative")
    m = h.size
    if m == 1:
        return 1
    j = np.arange(1, m)
    hits = np.flatnonzero(j * h[1:] >= np.cumsum(h[:-1]))
    return int(hits[0]) + 1 if hits.size else m


def flexional_index(h_plus: np.ndarray) -> int:
    """Valley position of a weight sequence that strictly decreases, bottoms
    out once, then strictly increases (the shape every inverse-S weighting
    produces).  Raises if the sequence is not valley-shaped.  1-indexed."""
    h = np.asarray(h_plus, dtype=np.float64)
    if h.size == 0:
        raise ValueError("weight vector must be nonempty")
    m = h.size
    if m == 1:
        return 1
    d = np.diff(h)
    rising = np.flatnonzero(d > 0.0)
    jt = int(rising[0]) + 1 if rising.size else m
    # before the valley: strictly decreasing, equality allowed on the last step only
    if np.any(d[: max(jt - 2, 0)] >= 0.0) or (jt >= 2 and d[jt - 2] > 0.0):
        raise ValueError("weights do not decrease strictly down to the valley")
    if np.any(d[jt - 1 :] <= 0.0):
        raise ValueError("weights do not increase strictly past the valley")
    return jt


@dataclass(frozen=True)
class GainSolution:
    """Optimal transformed gains: ``base`` on the first ``uniform_count``
    entries, then base * (uniform_count * h_j / lead_sum)**tail_exp."""

    uniform_count: int
    base: float
    h_plus: np.ndarray
    lead_sum: float
    tail_exp: float
    values: np.ndarray | None

    @property
    def n_plus(self) -> int:
        return self.h_plus.size

    def value_at(self, j: int) -> float:
        """Transformed gain of the j-th ticket (1-indexed)."""
        if not 1 <= j <= self.n_plus:
            raise IndexError(f"index {j} outside 1..{self.n_plus}")
        if j <= self.uniform_count:
            return self.base
        scale = self.uniform_count * self.h_plus[j - 1] / self.lead_sum
        return float(scale ** self.tail_exp * self.base)

    def to_array(self) -> np.ndarray:
        if self.values is not None:
            return self.values
        j = self.uniform_count
        scale = j * self.h_plus[j:] / self.lead_sum
        tail = scale ** self.tail_exp * self.base
        return np.concatenate((np.full(j, self.base), tail))


def solve_gain(params: CptParams, h_plus: np.ndarray, v: float) -> GainSolution:
    """Exact optimum of the gain-side subproblem for weight vector h_plus
    and budget v >= 0."""
    h = np.asarray(h_plus, dtype=np.float64)
    if v < 0.0:
        raise ValueError(f"budget must be nonnegative, got {v}")
    j = transitional_index(h)
    a = params.alpha
    tail_exp = a / (1.0 - a)
    lead = float(np.sum(h[:j]))
    tail_pow = float(np.sum(h[j:] ** (1.0 / (1.0 - a))))
    base = v * lead ** tail_exp / (lead ** (1.0 / (1.0 - a)) + j ** tail_exp * tail_pow)
    sol = GainSolution(
        uniform_count=j,
        base=base,
        h_plus=h,
        lead_sum=lead,
        tail_exp=tail_exp,
        values=None,
    )
    if h.size <= MATERIALIZE_LIMIT:
        sol = GainSolution(
            uniform_count=j,
            base=base,
            h_plus=h,
            lead_sum=lead,
            tail_exp=tail_exp,
            values=sol.to_array(),
        )
    return sol


def gain_value_coeff(params: CptParams, h_plus: np.ndarray, j: int) -> float:
    """Multiplier c such that the optimal gain payout equals c * v**(1/alpha)
    when the uniform block ends at index j."""
    h = np.asarray(h_plus, dtype=np.float64)
    if not 1 <= j <= h.size:
        raise ValueError(f"index {j} outside 1..{h.size}")
    a = params.alpha
    q = 1.0 / (1.0 - a)
    lead = float(np.sum(h[:j]))
    denom = lead ** q + float(np.sum((j ** a * h[j:]) ** q))
    return j / denom ** ((1.0 - a) / a)


@dataclass(frozen=True)
class KktReport:
    """Residuals of the first-order optimality system at a candidate gain
    solution, with the multipliers reconstructed from it.

    The closed-form multipliers satisfy the stationarity rows identically,
    so a candidate betrays itself through the complementarity products, the
    sign of mu, and primal feasibility; ``max_violation`` collects all of
    them on a common scale.
    """

    mu: np.ndarray
    eq_multiplier: float
    max_stationarity_residual: float
    max_complementarity_residual: float
    min_mu: float
    scale: float
    feasible: bool
    max_feasibility_residual: float
    max_violation: float


def verify_kkt_gain(
    params: CptParams, h_plus: np.ndarray, v: float, solution: GainSolution
) -> KktReport:
    """Substitute a candidate solution into the stationarity and
    complementarity conditions of the gain-side subproblem.

    The multipliers are built in closed form from the candidate itself, so a
    true optimum yields residuals at rounding level while a perturbed vector
    does not.
    """
    h = np.asarray(h_plus, dtype=np.float64)
    if v <= 0.0:
        raise ValueError(f"budget must be positive, got {v}")
    y = solution.to_array()
    m = y.size
    ba = params.balpha

    yc = np.maximum(y, 0.0)  # keep powers real if the candidate dips negative
    pow_full = yc ** ba
    pow_grad = yc ** (ba - 1.0)
    total = float(pow_full.sum())
    suffix_h = np.cumsum(h[::-1])[::-1]
    suffix_g = np.cumsum(pow_grad[::-1])[::-1]
    mu = -(ba / v) * total * suffix_h + ba * suffix_g
    eq_mult = -ba * total / v

    # stationarity rows, with mu_{m+1} = 0 closing the last one
    mu_next = np.concatenate((mu[1:], [0.0]))
    stationarity = ba * pow_grad + mu_next - mu + eq_mult * h
    # complementarity: mu_{j+1} (y_j - y_{j+1}) and mu_1 y_1
    comp = np.empty(m)
    comp[0] = mu[0] * y[0]
    comp[1:] = mu[1:] * (y[:-1] - y[1:])

    feas_eq = abs(float(h @ y) - v)
    feas_order = max(0.0, float(np.max(np.maximum(y[:-1] - y[1:], 0.0))) if m > 1 else 0.0)
    feas_sign = max(0.0, -float(y.min()))
    max_feas = max(feas_eq / max(1.0, abs(v)), feas_order, feas_sign)

    scale = max(
        1.0,
        ba * float(pow_grad.max(initial=0.0)),
        abs(eq_mult) * float(h.max(initial=0.0)),
        float(np.abs(mu).max(initial=0.0)),
    )
    max_stat = float(np.abs(stationarity).max())
    max_comp = float(np.abs(comp).max())
    min_mu = float(mu.min())

    # per-row violation on each row's own scale: complementarity wants
    # mu_j = 0 or the paired slack = 0, so take the smaller relative offense;
    # aggregate scales would hide perturbations of low-weight coordinates
    slack = np.empty(m)
    slack[0] = y[0]
    slack[1:] = y[1:] - y[:-1]
    rowscale = ba * np.maximum(yc, 1e-300) ** (ba - 1.0) + abs(eq_mult) * h + 1e-300
    local_y = np.empty(m)
    local_y[0] = max(abs(y[0]), 1e-300)
    local_y[1:] = np.maximum(np.maximum(np.abs(y[1:]), np.abs(y[:-1])), 1e-300)
    comp_rel = np.minimum(np.abs(mu) / rowscale, np.abs(slack) / local_y)
    violation = max(
        float(comp_rel.max()),
        float((np.maximum(-slack, 0.0) / local_y).max()),
        float((np.maximum(-mu, 0.0) / rowscale).max()),
        feas_eq / max(abs(v), 1e-300),
    )
    return KktReport(
        mu=mu,
        eq_multiplier=eq_mult,
        max_stationarity_residual=max_stat,
        max_complementarity_residual=max_comp,
        min_mu=min_mu,
        scale=scale,
        feasible=max_feas <= 1e-9,
        max_feasibility_residual=max_feas,
        max_violation=violation,
    )
