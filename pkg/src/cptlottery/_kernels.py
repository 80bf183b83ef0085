"""Compiled hot loops for the linear design sweeps.

Everything here works on uniform 1/n ticket probabilities, evaluating the
weighting function at integer multiples of 1/n on the fly so the sweeps run
in O(1) memory at n = 1e9.  Probabilities are always formed by true division
(k / n) so results match the numpy reference paths bit for bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# status codes shared with the engine
ZERO = 0
FINITE = 1
UNBOUNDED = 2


@njit(cache=True)
def weight_nb(p, g):
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    if g == 1.0:
        return p
    a = p ** g
    b = (1.0 - p) ** g
    return a / (a + b) ** (1.0 / g)


@njit(cache=True)
def wdiff_nb(hi, lo, n, g):
    """W(hi/n) - W(lo/n) for integer ticket counts hi >= lo.

    gamma = 1 short-circuits to (hi - lo)/n so that uniform weights come out
    exactly equal and the transitional-index comparisons behave as in exact
    arithmetic.
    """
    if g == 1.0:
        return (hi - lo) / n
    return weight_nb(hi / n, g) - weight_nb(lo / n, g)


@njit(cache=True)
def _kahan_add(s, c, x):
    y = x - c
    t = s + y
    c = (t - s) - y
    return t, c


@njit(cache=True)
def sweep_design(n, alpha, beta, lam, gp, gm, equal_exponents):
    """Scan every split (n_plus = k, n_minus = n - k) of the unconstrained
    design, maintaining the transitional index J and the tail prefix sum with
    a monotone two-pointer.

    Returns (status, best_k, best_J, best_S, best_cplus, best_cminus, best_F)
    where best_S is the sum of (weight step)**(1/(1-alpha)) over the tail
    indices above J at the winning split.  For equal_exponents the profit is
    either zero or unbounded; best_k then carries the witness split.
    """
    nf = float(n)
    qa = 1.0 / (1.0 - alpha)
    bb = 1.0 / beta
    e1 = beta / (beta - alpha) if not equal_exponents else 0.0
    e2 = alpha / (beta - alpha) if not equal_exponents else 0.0
    cfac = (alpha / beta) ** e2 * (1.0 - alpha / beta) if not equal_exponents else 0.0
    ca = (1.0 - alpha) / alpha

    J = 1
    m = 0  # m = k - J, index of the running tail prefix sum
    s = 0.0
    comp = 0.0
    wm = 0.0  # W+(m/n)
    wm1 = 0.0  # W+((m-1)/n)
    jpow = 1.0  # J ** (alpha/(1-alpha))

    best_f = 0.0
    best_k = 0
    best_j = 0
    best_s = 0.0
    best_cp = 0.0
    best_cm = 0.0
    for k in range(1, n):
        if k > 1:
            m += 1
            wm1 = wm
            wm = weight_nb(m / nf, gp)
            s, comp = _kahan_add(s, comp, (wm - wm1) ** qa)
        wk = weight_nb(k / nf, gp)
        while J < k:
            if wk - wm <= J * (wm - wm1):
                break
            s, comp = _kahan_add(s, comp, -((wm - wm1) ** qa))
            J += 1
            jpow = J ** (alpha * qa)
            m -= 1
            wm = wm1
            wm1 = weight_nb((m - 1) / nf, gp) if m >= 1 else 0.0
        sj = wk - wm
        cplus = J / (sj ** qa + jpow * s) ** ca
        nm = n - k
        cminus = nm * (lam * weight_nb(nm / nf, gm)) ** (-bb)
        if equal_exponents:
            if cplus < cminus:
                return UNBOUNDED, k, J, s + comp, cplus, cminus, -np.inf
        else:
            f = -(cminus ** e1) / (cplus ** e2) * cfac
            if f < best_f:
                best_f = f
                best_k = k
                best_j = J
                best_s = s + comp
                best_cp = cplus
                best_cm = cminus
    if equal_exponents or best_k == 0:
        return ZERO, 0, 0, 0.0, 0.0, 0.0, 0.0
    return FINITE, best_k, best_j, best_s, best_cp, best_cm, best_f


@njit(cache=True)
def sweep_fixed_cap(n, alpha, beta, lam, gp, gm, ymin):
    """Scan every split of the fixed-price design with all losses at the cap
    (valid when alpha >= beta): budget v = W-(n_minus/n) * ymin per split.

    Returns (status, best_k, best_J, best_S, best_cplus, best_v, best_F).
    """
    nf = float(n)
    qa = 1.0 / (1.0 - alpha)
    ba = 1.0 / alpha
    bb = 1.0 / beta
    ca = (1.0 - alpha) / alpha
    loss_unit = (ymin / lam) ** bb  # revenue per capped loss ticket

    J = 1
    m = 0
    s = 0.0
    comp = 0.0
    wm = 0.0
    wm1 = 0.0
    jpow = 1.0

    best_f = 0.0
    best_k = 0
    best_j = 0
    best_s = 0.0
    best_cp = 0.0
    best_v = 0.0
    for k in range(1, n):
        if k > 1:
            m += 1
            wm1 = wm
            wm = weight_nb(m / nf, gp)
            s, comp = _kahan_add(s, comp, (wm - wm1) ** qa)
        wk = weight_nb(k / nf, gp)
        while J < k:
            if wk - wm <= J * (wm - wm1):
                break
            s, comp = _kahan_add(s, comp, -((wm - wm1) ** qa))
            J += 1
            jpow = J ** (alpha * qa)
            m -= 1
            wm = wm1
            wm1 = weight_nb((m - 1) / nf, gp) if m >= 1 else 0.0
        sj = wk - wm
        cplus = J / (sj ** qa + jpow * s) ** ca
        nm = n - k
        v = weight_nb(nm / nf, gm) * ymin
        f = cplus * v ** ba - nm * loss_unit
        if f < best_f:
            best_f = f
            best_k = k
            best_j = J
            best_s = s + comp
            best_cp = cplus
            best_v = v
    if best_k == 0:
        return ZERO, 0, 0, 0.0, 0.0, 0.0, 0.0
    return FINITE, best_k, best_j, best_s, best_cp, best_v, best_f


@njit(cache=True)
def build_tables(n, alpha, gp, j_of, c_plus_of, prefix):
    """Fill transitional indices, gain value coefficients, and the prefix
    sums of (weight step)**(1/(1-alpha)) for every gain count k in [1, n].

    Arrays must be preallocated with length n + 1; slot 0 holds J = 0,
    c = nan, prefix = 0.
    """
    nf = float(n)
    qa = 1.0 / (1.0 - alpha)
    ca = (1.0 - alpha) / alpha

    j_of[0] = 0
    c_plus_of[0] = np.nan
    prefix[0] = 0.0

    if gp == 1.0:
        # identity weighting: all steps equal 1/n exactly, so the running
        # average never drops below the next weight and J stays at 1
        step_pow = (1.0 / nf) ** qa
        for t in range(1, n + 1):
            prefix[t] = t * step_pow
        for k in range(1, n + 1):
            j_of[k] = 1
            c_plus_of[k] = 1.0 / (k * step_pow) ** ca
        return

    s = 0.0
    comp = 0.0
    wprev = 0.0
    for t in range(1, n + 1):
        wt = weight_nb(t / nf, gp)
        s, comp = _kahan_add(s, comp, (wt - wprev) ** qa)
        prefix[t] = s + comp
        wprev = wt

    J = 1
    jpow = 1.0
    for k in range(1, n + 1):
        wk = weight_nb(k / nf, gp)
        while J < k:
            m = k - J
            wm = weight_nb(m / nf, gp)
            wm1 = weight_nb((m - 1) / nf, gp)
            if wk - wm <= J * (wm - wm1):
                break
            J += 1
            jpow = J ** (alpha * qa)
        m = k - J
        wm = weight_nb(m / nf, gp)
        sj = wk - wm
        j_of[k] = J
        c_plus_of[k] = J / (sj ** qa + jpow * prefix[m]) ** ca


@njit(cache=True)
def tail_prefix_value(n, alpha, gp, m):
    """Fresh compensated prefix sum S_m of (weight step)**(1/(1-alpha))."""
    nf = float(n)
    qa = 1.0 / (1.0 - alpha)
    s = 0.0
    comp = 0.0
    wprev = 0.0
    for t in range(1, m + 1):
        wt = weight_nb(t / nf, gp)
        s, comp = _kahan_add(s, comp, (wt - wprev) ** qa)
        wprev = wt
    return s + comp
