"""Optimal design when the ticket price is fixed in advance: losses are
capped at the price's transformed value, so the loss side takes at most three
values (cap, one intermediate level, zero) and the middle level reduces to a
one-dimensional profile minimization on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cpt import CptParams, weight, weight_array
from .engine import (
    STATUS_FINITE,
    DesignResult,
    _gain_profile,
    _zero_result,
    precompute_gain_table,
)


class InfeasibleError(ValueError):
    """Raised when the budget cannot be met under the loss cap."""


def y_min(params: CptParams, w_min: float) -> float:
    """Transformed-loss cap lam * (-w_min)**beta induced by the fixed price
    -w_min (w_min is the worst outcome, strictly negative)."""
    if not w_min < 0.0:
        raise ValueError(f"w_min must be negative, got {w_min}")
    return params.lam * (-w_min) ** params.beta


@dataclass(frozen=True)
class BoundedLossSolution:
    """Loss-side optimum under a cap: ``cap_count`` entries at the cap, then
    ``active_count - cap_count`` at ``level``, zero beyond."""

    cap_count: int
    active_count: int
    level: float
    cap: float
    n_minus: int

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.n_minus)
        out[: self.cap_count] = self.cap
        out[self.cap_count : self.active_count] = self.level
        return out


def solve_loss_bounded(
    params: CptParams, h_minus: np.ndarray, v: float, ymin: float
) -> BoundedLossSolution:
    """Exact optimum of the capped loss-side subproblem by enumerating the
    (cap_count, active_count) structure; feasible iff 0 <= v <= ymin * sum(h)."""
    h = np.asarray(h_minus, dtype=np.float64)
    if h.size == 0:
        raise ValueError("weight vector must be nonempty")
    if ymin <= 0.0:
        raise ValueError(f"cap must be positive, got {ymin}")
    m = h.size
    prefix = np.concatenate(([0.0], np.cumsum(h)))
    if v < 0.0 or v > ymin * prefix[m]:
        raise InfeasibleError(
            f"budget {v} outside the feasible interval [0, {ymin * prefix[m]}]"
        )
    bb = params.bbeta
    unit = (ymin / params.lam) ** bb
    best = None
    best_obj = math.inf
    # cap-only candidates, admitted where the budget hits the boundary exactly
    for l1 in range(m + 1):
        if v == ymin * prefix[l1]:
            obj = -l1 * unit
            if obj < best_obj:
                best_obj = obj
                best = (l1, l1, 0.0)
    for l1 in range(m):
        lo = ymin * prefix[l1]
        if lo > v:
            break
        l2 = np.arange(l1 + 1, m + 1)
        feasible = v <= ymin * prefix[l2]
        if not feasible.any():
            continue
        l2 = l2[feasible]
        mid = prefix[l2] - prefix[l1]
        level = (v - lo) / mid
        obj = -l1 * unit - (l2 - l1) * (level / params.lam) ** bb
        i = int(np.argmin(obj))
        if obj[i] < best_obj:
            best_obj = float(obj[i])
            best = (l1, int(l2[i]), float(np.clip(level[i], 0.0, ymin)))
    l1, l2, level = best
    return BoundedLossSolution(
        cap_count=l1, active_count=l2, level=level, cap=ymin, n_minus=m
    )


@dataclass(frozen=True)
class ScalarProfile:
    """One-dimensional reduction of the fixed-price middle problem:
    f(kappa) = (A + kappa)**balpha - B * kappa**bbeta on [0, 1]."""

    A: float
    B: float
    balpha: float
    bbeta: float

    def __post_init__(self):
        if self.A < 0.0:
            raise ValueError(f"A must be nonnegative, got {self.A}")
        if self.B <= 0.0:
            raise ValueError(f"B must be positive, got {self.B}")

    def f(self, kappa):
        return (self.A + kappa) ** self.balpha - self.B * kappa ** self.bbeta

    def df(self, kappa):
        return (
            self.balpha * (self.A + kappa) ** (self.balpha - 1.0)
            - self.bbeta * self.B * kappa ** (self.bbeta - 1.0)
        )


def solve_scalar_profile(profile: ScalarProfile):
    """Global minimum of the profile over [0, 1]: both endpoints plus every
    interior root of the derivative, isolated by a 1024-interval sign scan
    and closed by bisection with a short Newton polish.

    When balpha <= bbeta (alpha >= beta) interior stationary points are
    maxima, so the returned kappa is an endpoint.
    """
    grid = np.linspace(0.0, 1.0, 1025)
    dv = profile.df(grid[1:-1])
    candidates = [0.0, 1.0]
    sign = np.sign(dv)
    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    roots = grid[1:-1][sign == 0].tolist()
    for i in flips:
        lo, hi = grid[i + 1], grid[i + 2]
        flo = profile.df(lo)
        while hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            fm = profile.df(mid)
            if flo * fm <= 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        r = 0.5 * (lo + hi)
        for _ in range(3):
            h = 1e-7 * max(r, 1e-7)
            d2 = (profile.df(r + h) - profile.df(r - h)) / (2.0 * h)
            if d2 == 0.0 or not math.isfinite(d2):
                break
            r_new = r - profile.df(r) / d2
            if not 0.0 < r_new < 1.0:
                break
            r = r_new
        roots.append(r)
    candidates.extend(roots)
    values = [profile.f(k) for k in candidates]
    i = int(np.argmin(values))
    return candidates[i], values[i]


def _loss_levels_fixed(w_min, ymin, params, l1, n_minus, kappa):
    """Outcome-space loss levels for a capped optimum; a kappa of 1 collapses
    the intermediate level into the cap."""
    if kappa >= 1.0 or l1 == n_minus:
        return ((w_min, n_minus),)
    level_y = kappa * ymin
    w_mid = -((level_y / params.lam) ** params.bbeta)
    if l1 == 0:
        return ((w_mid, n_minus),)
    return ((w_min, l1), (w_mid, n_minus - l1))


def _fixed_result(params, n, n_plus, j, tail_sum, v_star, f_value, w_min, loss_levels):
    gain = _gain_profile(params, n, n_plus, j, tail_sum, v_star)
    return DesignResult(
        n=n,
        n_minus=n - n_plus,
        n_plus=n_plus,
        v_star=v_star,
        ticket_price=-w_min,
        gain=gain,
        loss_levels=loss_levels,
        profit=-f_value,
        status=STATUS_FINITE,
    )


def design_fixed_price(params: CptParams, n: int, w_min: float) -> DesignResult:
    """Optimal fixed-price design for any exponent order.

    Sweeps every split and every cap count (all remaining losses active, per
    the no-zero-components structure of a positive optimum), solving the
    scalar profile for each pair.  The inner solves are vectorized over the
    cap count; interior candidates exist only when alpha < beta and are then
    the upper root of the derivative, bracketed through its unimodal log
    ratio.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    if not w_min < 0.0:
        raise ValueError(f"w_min must be negative, got {w_min}")
    a, b = params.alpha, params.beta
    ba, bb = params.balpha, params.bbeta
    ymin = y_min(params, w_min)
    loss_unit = (ymin / params.lam) ** bb

    table = precompute_gain_table(params, n)
    w_loss = weight_array(params.gamma_minus, np.arange(0, n) / n)  # W-(i/n), i < n

    best = None  # (g, n_plus, l1, kappa)
    best_g = 0.0
    for k in range(1, n):
        n_minus = n - k
        c_plus = float(table.c_plus_of[k])
        total = weight(params.gamma_minus, n_minus / n)
        h1 = w_loss[:n_minus]  # W-(l1/n) for l1 = 0..n_minus-1
        h_mid = total - h1
        A = h1 / h_mid
        B = (n_minus - np.arange(n_minus)) * ymin ** (bb - ba) / (
            c_plus * h_mid ** ba * params.lam ** bb
        )
        scale = c_plus * ymin ** ba * h_mid ** ba

        f0 = A ** ba  # kappa = 0
        f1 = (A + 1.0) ** ba - B  # kappa = 1
        fmin = np.minimum(f0, f1)
        kappa = np.where(f1 < f0, 1.0, 0.0)
        if a < b:
            root, ok = _upper_root_vec(A, B, ba, bb)
            f_root = np.where(ok, (A + root) ** ba - B * root ** bb, np.inf)
            take = f_root < fmin
            fmin = np.where(take, f_root, fmin)
            kappa = np.where(take, root, kappa)
        g = scale * fmin - np.arange(n_minus) * loss_unit
        i = int(np.argmin(g))  # ties resolve to the smallest cap count
        if g[i] < best_g:
            best_g = float(g[i])
            best = (k, i, float(kappa[i]))
    if best is None:
        return _zero_result(n)
    k, l1, kappa = best
    n_minus = n - k
    total = weight(params.gamma_minus, n_minus / n)
    v_star = ymin * (w_loss[l1] + kappa * (total - w_loss[l1]))
    j = int(table.J_of[k])
    tail_sum = float(table.prefix[k - j])
    loss_levels = _loss_levels_fixed(w_min, ymin, params, l1, n_minus, kappa)
    return _fixed_result(params, n, k, j, tail_sum, v_star, best_g, w_min, loss_levels)


def _upper_root_vec(A, B, ba, bb):
    """Upper root of the profile derivative on (0, 1], vectorized.

    The derivative's log ratio psi is unimodal with a single valley at
    A*(bb-1)/(ba-bb) (requires ba > bb); the minimizing root, when present in
    (0, 1], is the one on the rising side.  Returns (root, found) arrays.
    """
    with np.errstate(divide="ignore", invalid="ignore"):

        def psi(k):
            return (
                math.log(ba)
                + (ba - 1.0) * np.log(A + k)
                - np.log(bb * B)
                - (bb - 1.0) * np.log(k)
            )

        k_hat = np.minimum(A * (bb - 1.0) / (ba - bb), 1.0)
        lo = k_hat.copy()
        hi = np.ones_like(A)
        found = (psi(np.maximum(k_hat, 1e-300)) < 0.0) & (psi(hi) >= 0.0)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            neg = psi(np.maximum(mid, 1e-300)) < 0.0
            lo = np.where(found & neg, mid, lo)
            hi = np.where(found & ~neg, mid, hi)
        return 0.5 * (lo + hi), found


def design_fixed_price_fast(params: CptParams, n: int, w_min: float) -> DesignResult:
    """Linear-time fixed-price design for alpha >= beta, where every losing
    ticket sits at the cap: one streaming sweep over the split."""
    n = int(n)
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    if not w_min < 0.0:
        raise ValueError(f"w_min must be negative, got {w_min}")
    if params.alpha < params.beta:
        raise ValueError(
            "fast path requires alpha >= beta; use design_fixed_price instead"
        )
    ymin = y_min(params, w_min)
    status, k, j, tail_sum, c_plus, v_star, f = _kernels.sweep_fixed_cap(
        n,
        params.alpha,
        params.beta,
        params.lam,
        params.gamma_plus,
        params.gamma_minus,
        ymin,
    )
    if status == _kernels.ZERO:
        return _zero_result(n)
    loss_levels = ((w_min, n - k),)
    return _fixed_result(params, n, k, j, tail_sum, v_star, f, w_min, loss_levels)
