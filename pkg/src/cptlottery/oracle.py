"""Independent reference solvers for small instances: generic numeric
optimization and exhaustive enumeration, deliberately ignorant of the
closed-form structure they are used to certify."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .cpt import CptParams, decision_weights, Prospect
from .fixed_price import y_min

_MAX_ORACLE_WEIGHTS = 12
_MAX_ORACLE_TICKETS = 8


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 100_000
    polish_iters: int = 60
    sample_count: int = 100_000
    seed: int = 0
    multistarts: int = 50

    def __post_init__(self):
        for name in ("grid_points", "polish_iters", "sample_count", "multistarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class OracleDesign:
    """Ground-truth design from enumeration: split, price, profit, and the
    materialized outcome vectors."""

    n: int
    n_minus: int
    n_plus: int
    v_star: float
    ticket_price: float
    profit: float
    status: str
    w_minus: np.ndarray | None
    w_plus: np.ndarray | None


def _golden_min(f, lo, hi, iters):
    """Golden-section minimization on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    return x, min(fc, fd)


def _grid_then_polish(f, grid, iters):
    """Dense scan of f over a grid followed by golden-section refinement of
    the bracketing neighbors of the best point."""
    vals = f(grid)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    x, fx = _golden_min(lambda t: float(f(np.asarray([t]))[0]), lo, hi, iters)
    if vals[i] < fx:
        return float(grid[i]), float(vals[i])
    return float(x), float(fx)


def _feasible_gain_start(rng, h, v):
    """Random feasible point: sorted nonnegative draws rescaled onto the
    budget hyperplane (scaling preserves the ordering)."""
    y = np.sort(rng.random(h.size))
    s = float(h @ y)
    if s <= 0.0:
        y = np.full(h.size, 1.0)
        s = float(h.sum())
    return y * (v / s)


def oracle_gain(params: CptParams, h_plus, v: float, config: OracleConfig = OracleConfig()):
    """Numeric solution of the gain-side subproblem by multistart SLSQP on
    the convex program itself.  Returns (y, objective)."""
    h = np.asarray(h_plus, dtype=np.float64)
    m = h.size
    if m > _MAX_ORACLE_WEIGHTS:
        raise ValueError(f"oracle limited to {_MAX_ORACLE_WEIGHTS} weights, got {m}")
    if v < 0.0:
        raise ValueError(f"budget must be nonnegative, got {v}")
    if v == 0.0:
        return np.zeros(m), 0.0
    ba = params.balpha
    # precondition: solve for z = y/scale so the variables sit near 1
    scale = v / max(float(h.sum()), 1e-300)
    budget = float(h.sum())

    def objective(z):
        return float(np.sum(np.maximum(z, 0.0) ** ba))

    def gradient(z):
        return ba * np.maximum(z, 0.0) ** (ba - 1.0)

    constraints = [{"type": "eq", "fun": lambda z: float(h @ z - budget),
                    "jac": lambda z: h}]
    # z_1 >= 0 and z_{i+1} - z_i >= 0, stacked as one linear inequality block
    ineq = np.zeros((m, m))
    ineq[0, 0] = 1.0
    for i in range(m - 1):
        ineq[i + 1, i] = -1.0
        ineq[i + 1, i + 1] = 1.0
    constraints.append({"type": "ineq", "fun": lambda z: ineq @ z,
                        "jac": lambda z: ineq})

    rng = np.random.default_rng(config.seed)
    starts = [np.ones(m)]
    for _ in range(config.multistarts - 1):
        starts.append(_feasible_gain_start(rng, h, budget))
    best_z, best_obj = None, math.inf
    converged = []
    for x0 in starts:
        res = minimize(
            objective,
            x0,
            jac=gradient,
            method="SLSQP",
            constraints=constraints,
            options={"maxiter": 400, "ftol": 1e-14},
        )
        z = np.maximum(res.x, 0.0)
        if abs(float(h @ z) - budget) > 1e-9 * budget:
            continue
        obj = objective(z)
        converged.append(obj)
        if obj < best_obj:
            best_obj = obj
            best_z = z
    if best_z is None:
        raise RuntimeError("no oracle start converged to a feasible point")
    # agreement certificate: the program is convex with a unique optimum, so
    # at least two independent starts must land on the best value (stalled
    # starts may sit above it and are ignored)
    agree = sum(1 for o in converged if o <= best_obj * (1.0 + 1e-6))
    if len(converged) >= 2 and agree < 2:
        raise RuntimeError("no two oracle starts agree at the best objective")
    return best_z * scale, float(best_obj * scale ** ba)


def oracle_loss(params: CptParams, h_minus, v: float, config: OracleConfig = OracleConfig()):
    """Numeric solution of the loss-side subproblem: enumerate every vertex
    (first ell entries equal, rest zero) and also sample the feasible region
    to confirm no interior point does better.  Returns (y, objective)."""
    h = np.asarray(h_minus, dtype=np.float64)
    m = h.size
    if m > _MAX_ORACLE_WEIGHTS:
        raise ValueError(f"oracle limited to {_MAX_ORACLE_WEIGHTS} weights, got {m}")
    if v < 0.0:
        raise ValueError(f"budget must be nonnegative, got {v}")
    if v == 0.0:
        return np.zeros(m), 0.0
    bb = params.bbeta
    lam = params.lam

    def objective(y):
        return -float(np.sum((y / lam) ** bb))

    prefix = np.cumsum(h)
    best_y, best_obj = None, math.inf
    for ell in range(1, m + 1):
        y = np.zeros(m)
        y[:ell] = v / prefix[ell - 1]
        obj = objective(y)
        if obj < best_obj:
            best_obj, best_y = obj, y
    rng = np.random.default_rng(config.seed)
    draws = np.sort(rng.random((config.sample_count, m)), axis=1)[:, ::-1]
    weights = draws @ h
    ok = weights > 0.0
    ys = draws[ok] * (v / weights[ok])[:, None]
    objs = -np.sum((ys / lam) ** bb, axis=1)
    i = int(np.argmin(objs))
    if objs[i] < best_obj:
        best_obj, best_y = float(objs[i]), ys[i]
    return best_y, float(best_obj)


def _uniform_split_weights(params, n, n_minus):
    outcomes = np.concatenate((np.full(n_minus, -1.0), np.full(n - n_minus, 1.0)))
    prospect = Prospect(outcomes, np.full(n, 1.0 / n), n_minus)
    return decision_weights(params, prospect)


def oracle_design(params: CptParams, n: int, config: OracleConfig = OracleConfig()) -> OracleDesign:
    """Ground-truth unconstrained design by exhaustive split enumeration with
    a dense budget grid (plus refinement) at each split."""
    n = int(n)
    if n > _MAX_ORACLE_TICKETS:
        raise ValueError(f"oracle limited to {_MAX_ORACLE_TICKETS} tickets, got {n}")
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    ba, bb = params.balpha, params.bbeta
    grid = np.concatenate(([0.0], np.geomspace(1e-9, 1e9, config.grid_points)))
    best = None
    best_f = 0.0
    for n_minus in range(1, n):
        dw = _uniform_split_weights(params, n, n_minus)
        _, cg = oracle_gain(params, dw.h_plus, 1.0, config)
        _, cl = oracle_loss(params, dw.h_minus, 1.0, config)
        cl = -cl

        def f_mid(v):
            return cg * v ** ba - cl * v ** bb

        vals = f_mid(grid)
        if int(np.argmin(vals)) == grid.size - 1 and vals[-1] < 0.0:
            # still descending at the top of a 18-decade grid: divergent split
            return OracleDesign(n, n_minus, n - n_minus, math.inf, math.inf,
                                math.inf, "unbounded", None, None)
        v_star, f = _grid_then_polish(f_mid, grid, config.polish_iters)
        if f < best_f:
            best_f = f
            best = (n_minus, v_star, dw)
    if best is None:
        return OracleDesign(n, 0, n, 0.0, 0.0, 0.0, "zero", None, None)
    n_minus, v_star, dw = best
    y_plus, _ = oracle_gain(params, dw.h_plus, v_star, config)
    y_minus, _ = oracle_loss(params, dw.h_minus, v_star, config)
    w_plus = y_plus ** ba
    w_minus = -((y_minus / params.lam) ** bb)
    return OracleDesign(
        n=n,
        n_minus=n_minus,
        n_plus=n - n_minus,
        v_star=v_star,
        ticket_price=float((y_minus[0] / params.lam) ** bb),
        profit=-best_f,
        status="finite",
        w_minus=w_minus,
        w_plus=w_plus,
    )


def oracle_fixed(params: CptParams, n: int, w_min: float,
                 config: OracleConfig = OracleConfig()) -> OracleDesign:
    """Ground-truth fixed-price design: enumerate splits and every capped
    loss structure, with a dense scan (plus refinement) over the interpolation
    variable on [0, 1]."""
    n = int(n)
    if n > _MAX_ORACLE_TICKETS:
        raise ValueError(f"oracle limited to {_MAX_ORACLE_TICKETS} tickets, got {n}")
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    if not w_min < 0.0:
        raise ValueError(f"w_min must be negative, got {w_min}")
    ba, bb = params.balpha, params.bbeta
    lam = params.lam
    ymin = y_min(params, w_min)
    kappa_grid = np.linspace(0.0, 1.0, config.grid_points)
    best = None
    best_g = 0.0
    for n_minus in range(1, n):
        dw = _uniform_split_weights(params, n, n_minus)
        _, cg = oracle_gain(params, dw.h_plus, 1.0, config)
        prefix = np.concatenate(([0.0], np.cumsum(dw.h_minus)))
        for l1 in range(0, n_minus):
            for l2 in range(l1 + 1, n_minus + 1):
                lo = ymin * prefix[l1]
                span = ymin * (prefix[l2] - prefix[l1])

                def g_of(kappa):
                    v = lo + kappa * span
                    return (
                        cg * v ** ba
                        - l1 * (ymin / lam) ** bb
                        - (l2 - l1) * (kappa * ymin / lam) ** bb
                    )

                kappa, g = _grid_then_polish(g_of, kappa_grid, config.polish_iters)
                if g < best_g:
                    best_g = g
                    best = (n_minus, l1, l2, kappa, dw)
    if best is None:
        return OracleDesign(n, 0, n, 0.0, -w_min, 0.0, "zero", None, None)
    n_minus, l1, l2, kappa, dw = best
    prefix = np.concatenate(([0.0], np.cumsum(dw.h_minus)))
    v_star = ymin * (prefix[l1] + kappa * (prefix[l2] - prefix[l1]))
    y_plus, _ = oracle_gain(params, dw.h_plus, v_star, config)
    y_minus = np.zeros(n_minus)
    y_minus[:l1] = ymin
    y_minus[l1:l2] = kappa * ymin
    return OracleDesign(
        n=n,
        n_minus=n_minus,
        n_plus=n - n_minus,
        v_star=v_star,
        ticket_price=-w_min,
        profit=-best_g,
        status="finite",
        w_minus=-((y_minus / lam) ** bb),
        w_plus=y_plus ** ba,
    )
