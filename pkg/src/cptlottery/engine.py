"""Whole-lottery optimization: the per-split middle-level closed form, the
linear precompute sweep, the end-to-end O(n) design, prize-table expansion,
and the utility-floor extensions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cpt import CptParams, weight, weight_array
from .gain import gain_value_coeff, transitional_index
from .loss import best_ell, loss_value_coeff

STATUS_FINITE = "finite"
STATUS_ZERO = "zero"
STATUS_UNBOUNDED = "unbounded"

# expansion switches from streaming to per-decade boundary bisection above this
_STREAM_LIMIT = 4_000_000
# epsilon-shifted designs go through materialized tables; cap to protect RAM
_EPS_TABLE_LIMIT = 20_000_000


@dataclass(frozen=True)
class GainTable:
    """Per-gain-count tables: transitional index, gain value coefficient, and
    prefix sums of (weight step)**(1/(1-alpha)).  Entries are 1-indexed by the
    gain count k; slot 0 is a placeholder."""

    n: int
    J_of: np.ndarray
    c_plus_of: np.ndarray
    prefix: np.ndarray


def precompute_gain_table(params: CptParams, n: int) -> GainTable:
    """Tables for every gain count k in [1, n] in one O(n) two-pointer sweep."""
    n = int(n)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    j_of = np.zeros(n + 1, dtype=np.int64)
    c_plus_of = np.zeros(n + 1, dtype=np.float64)
    prefix = np.zeros(n + 1, dtype=np.float64)
    _kernels.build_tables(n, params.alpha, params.gamma_plus, j_of, c_plus_of, prefix)
    return GainTable(n=n, J_of=j_of, c_plus_of=c_plus_of, prefix=prefix)


def mid_optimum(c_plus: float, c_minus: float, params: CptParams):
    """Minimum of c_plus * v**(1/alpha) - c_minus * v**(1/beta) over v >= 0.

    Returns (status, F, v_star): a finite interior optimum when alpha < beta,
    zero when alpha = beta and the gain coefficient dominates, unbounded
    otherwise.
    """
    if c_plus <= 0.0:
        raise ValueError(f"gain coefficient must be positive, got {c_plus}")
    if c_minus < 0.0:
        raise ValueError(f"loss coefficient must be nonnegative, got {c_minus}")
    a, b = params.alpha, params.beta
    if a < b:
        if c_minus == 0.0:
            return STATUS_FINITE, 0.0, 0.0
        v_star = (a * c_minus / (b * c_plus)) ** (a * b / (b - a))
        f = (
            -(c_minus ** (b / (b - a)))
            / c_plus ** (a / (b - a))
            * (a / b) ** (a / (b - a))
            * (1.0 - a / b)
        )
        return STATUS_FINITE, f, v_star
    if a == b:
        if c_plus >= c_minus:
            return STATUS_ZERO, 0.0, 0.0
        return STATUS_UNBOUNDED, -math.inf, math.inf
    # alpha > beta: the loss term dominates for large v whenever it is present
    if c_minus == 0.0:
        return STATUS_ZERO, 0.0, 0.0
    return STATUS_UNBOUNDED, -math.inf, math.inf


def _eps_objective(c_plus, c_minus, balpha, bbeta, eps, v):
    return c_plus * (v + eps) ** balpha - c_minus * v ** bbeta


def mid_optimum_eps(c_plus: float, c_minus: float, params: CptParams, eps: float):
    """Minimum of c_plus * (v+eps)**(1/alpha) - c_minus * v**(1/beta) over
    v >= 0, the utility-floor variant of ``mid_optimum``.

    Solved numerically: geometric sign scan of the derivative over
    [1e-30, 1e30], bisection on each bracket, then Newton polish.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    if eps == 0.0:
        return mid_optimum(c_plus, c_minus, params)
    if c_plus <= 0.0:
        raise ValueError(f"gain coefficient must be positive, got {c_plus}")
    if c_minus < 0.0:
        raise ValueError(f"loss coefficient must be nonnegative, got {c_minus}")
    a, b = params.alpha, params.beta
    ba, bb = params.balpha, params.bbeta
    if c_minus == 0.0:
        return STATUS_FINITE, c_plus * eps ** ba, 0.0
    if a > b:
        return STATUS_UNBOUNDED, -math.inf, math.inf
    if a == b and c_plus < c_minus:
        # derivative turns negative for good once (v+eps)/v falls below
        # (c_minus/c_plus)**(1/(balpha-1))
        return STATUS_UNBOUNDED, -math.inf, math.inf

    def dphi(v):
        return ba * c_plus * (v + eps) ** (ba - 1.0) - bb * c_minus * v ** (bb - 1.0)

    grid = np.geomspace(1e-30, 1e30, 961)
    dv = ba * c_plus * (grid + eps) ** (ba - 1.0) - bb * c_minus * grid ** (bb - 1.0)
    sign = np.sign(dv)
    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    roots = []
    for i in flips:
        lo, hi = grid[i], grid[i + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if dphi(lo) * dphi(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        r = 0.5 * (lo + hi)
        for _ in range(3):  # Newton polish
            d2 = ba * (ba - 1.0) * c_plus * (r + eps) ** (ba - 2.0) - bb * (
                bb - 1.0
            ) * c_minus * r ** (bb - 2.0)
            if d2 == 0.0 or not math.isfinite(d2):
                break
            step = dphi(r) / d2
            if not math.isfinite(step):
                break
            r_new = r - step
            if r_new <= 0.0:
                break
            r = r_new
        roots.append(r)
    candidates = [0.0] + [r for r in grid[sign == 0].tolist()] + roots
    values = [_eps_objective(c_plus, c_minus, ba, bb, eps, v) for v in candidates]
    i = int(np.argmin(values))
    return STATUS_FINITE, values[i], candidates[i]


def _eps_middle_vec(c_plus, c_minus, params, eps):
    """Vectorized utility-floor middle optimum for alpha < beta.

    The derivative's log ratio is strictly unimodal in v (single stationary
    point at eps*(bbeta-1)/(balpha-bbeta)), so the relevant minimum is either
    v = 0 or the upper root of the derivative, bracketed and bisected per
    entry.  Returns (F, v_star) arrays.
    """
    ba, bb = params.balpha, params.bbeta
    c_plus = np.asarray(c_plus, dtype=np.float64)
    c_minus = np.asarray(c_minus, dtype=np.float64)

    def psi(v):
        # log of the positive-to-negative derivative term ratio
        return (
            np.log(ba * c_plus)
            + (ba - 1.0) * np.log(v + eps)
            - np.log(bb * c_minus)
            - (bb - 1.0) * np.log(v)
        )

    v_hat = np.full(c_plus.shape, eps * (bb - 1.0) / (ba - bb))
    has_root = psi(v_hat) < 0.0
    lo = v_hat.copy()
    hi = np.maximum(2.0 * v_hat, eps)
    for _ in range(300):
        grow = has_root & (psi(hi) < 0.0)
        if not grow.any():
            break
        hi[grow] *= 4.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        neg = psi(mid) < 0.0
        lo = np.where(has_root & neg, mid, lo)
        hi = np.where(has_root & ~neg, mid, hi)
    root = 0.5 * (lo + hi)
    f0 = c_plus * eps ** ba
    f_root = np.where(
        has_root, _eps_objective(c_plus, c_minus, ba, bb, eps, root), np.inf
    )
    take_root = f_root < f0
    return np.where(take_root, f_root, f0), np.where(take_root, root, 0.0)


@dataclass(frozen=True)
class GainProfile:
    """Winning outcomes of a design in closed form: ``uniform_count`` tickets
    at ``base_outcome``, then an increasing tail driven by the decision
    weights.  Evaluates any index without materializing the vector."""

    n: int
    n_plus: int
    uniform_count: int
    base_outcome: float
    lead_sum: float
    gamma_plus: float
    alpha: float

    def outcome(self, j: int) -> float:
        """Outcome of the j-th winning ticket (1-indexed, nondecreasing)."""
        if not 1 <= j <= self.n_plus:
            raise IndexError(f"index {j} outside 1..{self.n_plus}")
        if j <= self.uniform_count:
            return self.base_outcome
        g, n = self.gamma_plus, self.n
        h = weight(g, (self.n_plus - j + 1) / n) - weight(g, (self.n_plus - j) / n)
        scale = self.uniform_count * h / self.lead_sum
        return self.base_outcome * scale ** (1.0 / (1.0 - self.alpha))

    def outcomes_slice(self, j_lo: int, j_hi: int) -> np.ndarray:
        """Outcomes for ticket indices j_lo..j_hi inclusive (1-indexed)."""
        if not (1 <= j_lo <= j_hi <= self.n_plus):
            raise IndexError(f"range {j_lo}..{j_hi} outside 1..{self.n_plus}")
        j = np.arange(j_lo, j_hi + 1, dtype=np.int64)
        out = np.full(j.size, self.base_outcome)
        tail = j > self.uniform_count
        if tail.any():
            jt = j[tail]
            g = self.gamma_plus
            h = weight_array(g, (self.n_plus - jt + 1) / self.n) - weight_array(
                g, (self.n_plus - jt) / self.n
            )
            scale = self.uniform_count * h / self.lead_sum
            out[tail] = self.base_outcome * scale ** (1.0 / (1.0 - self.alpha))
        return out

    @property
    def max_outcome(self) -> float:
        return self.outcome(self.n_plus)


@dataclass(frozen=True)
class DesignResult:
    """Compact optimal lottery for one parameter set and ticket count."""

    n: int
    n_minus: int
    n_plus: int
    v_star: float
    ticket_price: float
    gain: GainProfile | None
    loss_levels: tuple  # ((outcome, count), ...) for the losing tickets
    profit: float
    status: str
    eps: float = 0.0


def _zero_result(n: int) -> DesignResult:
    return DesignResult(
        n=n,
        n_minus=0,
        n_plus=n,
        v_star=0.0,
        ticket_price=0.0,
        gain=None,
        loss_levels=(),
        profit=0.0,
        status=STATUS_ZERO,
    )


def _unbounded_result(n: int, n_plus: int) -> DesignResult:
    return DesignResult(
        n=n,
        n_minus=n - n_plus,
        n_plus=n_plus,
        v_star=math.inf,
        ticket_price=math.inf,
        gain=None,
        loss_levels=(),
        profit=math.inf,
        status=STATUS_UNBOUNDED,
    )


def _gain_profile(params, n, n_plus, j, tail_sum, budget):
    """Closed-form gain profile at a split: J leading tickets at the base
    level, increasing tail above, meeting the weighted utility budget."""
    a = params.alpha
    g = params.gamma_plus
    lead = weight(g, n_plus / n) - weight(g, (n_plus - j) / n)
    q = 1.0 / (1.0 - a)
    y_base = budget * lead ** (a * q) / (lead ** q + j ** (a * q) * tail_sum)
    return GainProfile(
        n=n,
        n_plus=n_plus,
        uniform_count=j,
        base_outcome=y_base ** (1.0 / a),
        lead_sum=lead,
        gamma_plus=g,
        alpha=a,
    )


def _finite_result(params, n, n_plus, j, tail_sum, v_star, f_value, eps=0.0):
    """Assemble a DesignResult for the unconstrained (or utility-floor)
    optimum at the given split; all losing tickets sit at one level."""
    n_minus = n - n_plus
    gain = _gain_profile(params, n, n_plus, j, tail_sum, v_star + eps)
    y_loss = v_star / weight(params.gamma_minus, n_minus / n)
    price = (y_loss / params.lam) ** params.bbeta
    return DesignResult(
        n=n,
        n_minus=n_minus,
        n_plus=n_plus,
        v_star=v_star,
        ticket_price=price,
        gain=gain,
        loss_levels=((-price, n_minus),),
        profit=-f_value,
        status=STATUS_FINITE,
        eps=eps,
    )


def design_optimal(params: CptParams, n: int, eps: float = 0.0) -> DesignResult:
    """Profit-maximizing lottery over all splits of n tickets into losses and
    gains, in O(n) time and O(1) extra memory.

    With eps > 0 the buyer is guaranteed expected utility eps instead of 0
    (requires alpha < beta and tables that fit in memory).
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    a, b = params.alpha, params.beta

    if eps > 0.0:
        if a >= b:
            raise ValueError("utility-floor designs require alpha < beta")
        if n > _EPS_TABLE_LIMIT:
            raise ValueError(f"utility-floor designs limited to n <= {_EPS_TABLE_LIMIT}")
        return _design_eps(params, n, eps)

    if a > b:
        # any split diverges: stretch the loss scale and compensate the gains
        return _unbounded_result(n, n_plus=1)

    status, k, j, tail_sum, c_plus, c_minus, f = _kernels.sweep_design(
        n, a, b, params.lam, params.gamma_plus, params.gamma_minus, a == b
    )
    if status == _kernels.ZERO:
        return _zero_result(n)
    if status == _kernels.UNBOUNDED:
        return _unbounded_result(n, n_plus=k)
    _, f_val, v_star = mid_optimum(c_plus, c_minus, params)
    return _finite_result(params, n, k, j, tail_sum, v_star, f_val)


def _design_eps(params: CptParams, n: int, eps: float) -> DesignResult:
    table = precompute_gain_table(params, n)
    k = np.arange(1, n, dtype=np.int64)
    n_minus = n - k
    c_plus = table.c_plus_of[1:n]
    c_minus = n_minus * (
        params.lam * weight_array(params.gamma_minus, n_minus / n)
    ) ** (-params.bbeta)
    f, v = _eps_middle_vec(c_plus, c_minus, params, eps)
    i = int(np.argmin(f))  # first minimum, so the smaller gain count wins ties
    k_best = int(k[i])
    j = int(table.J_of[k_best])
    tail_sum = float(table.prefix[k_best - j])
    return _finite_result(params, n, k_best, j, tail_sum, float(v[i]), float(f[i]), eps=eps)


def naive_design(params: CptParams, n: int) -> DesignResult:
    """Quadratic reference: per split, rebuild the weight vectors and solve
    both low-level problems directly.  Ground truth for the linear sweep."""
    n = int(n)
    if n < 2:
        raise ValueError(f"need at least 2 tickets, got {n}")
    gp, gm = params.gamma_plus, params.gamma_minus
    best = None
    best_f = 0.0
    witness_unbounded = None
    for k in range(1, n):
        n_minus = n - k
        cum_g = weight_array(gp, np.arange(k, -1, -1) / n)
        h_plus = cum_g[:-1] - cum_g[1:]
        cum_l = weight_array(gm, np.arange(0, n_minus + 1) / n)
        h_minus = np.diff(cum_l)
        j = transitional_index(h_plus)
        c_plus = gain_value_coeff(params, h_plus, j)
        ell = best_ell(params, h_minus)
        c_minus = loss_value_coeff(params, h_minus, ell)
        status, f, v_star = mid_optimum(c_plus, c_minus, params)
        if status == STATUS_UNBOUNDED and witness_unbounded is None:
            witness_unbounded = k
        if status == STATUS_FINITE and f < best_f:
            q = 1.0 / (1.0 - params.alpha)
            tail_sum = float(np.sum(h_plus[j:] ** q))
            best_f = f
            best = (k, j, tail_sum, v_star, ell, h_minus)
    if witness_unbounded is not None:
        return _unbounded_result(n, n_plus=witness_unbounded)
    if best is None:
        return _zero_result(n)
    k, j, tail_sum, v_star, ell, h_minus = best
    n_minus = n - k
    gain = _gain_profile(params, n, k, j, tail_sum, v_star)
    y_loss = v_star / float(np.sum(h_minus[:ell]))
    price = (y_loss / params.lam) ** params.bbeta
    loss_levels = [(-price, ell)]
    if ell < n_minus:
        loss_levels.append((0.0, n_minus - ell))
    return DesignResult(
        n=n,
        n_minus=n_minus,
        n_plus=k,
        v_star=v_star,
        ticket_price=price,
        gain=gain,
        loss_levels=tuple(loss_levels),
        profit=-best_f,
        status=STATUS_FINITE,
    )


@dataclass(frozen=True)
class PrizeTable:
    """Decade-bucket histogram of prizes plus headline aggregates."""

    n: int
    buckets: tuple  # ((lo, hi, count), ...) ascending, lo = 0.0 for the lowest
    zero_count: int
    max_prize: float
    gain_ratio: float
    profit: float
    ticket_price: float


def _decade_edges(max_prize: float) -> np.ndarray:
    """Bucket edges 10, 100, ... covering max_prize; bucket i is
    (edges[i-1], edges[i]] with an implicit lower edge at 0."""
    top = 1
    while 10.0 ** (top + 1) < max_prize:
        top += 1
    return 10.0 ** np.arange(1, top + 2)


def expand_design(design: DesignResult, decade_buckets: bool = True) -> PrizeTable:
    """Expand a compact design into a prize histogram.

    Prizes are outcomes plus the ticket price.  Winning tickets are counted
    per decade bucket (10^k, 10^{k+1}] with a single (0, 10] bucket at the
    bottom; losing tickets land on the zero row (full price lost) or, for
    partial refunds, in the positive buckets.
    """
    if design.status == STATUS_UNBOUNDED:
        raise RuntimeError("cannot expand an unbounded design")
    if design.status == STATUS_ZERO or design.gain is None:
        return PrizeTable(
            n=design.n,
            buckets=(),
            zero_count=design.n,
            max_prize=0.0,
            gain_ratio=0.0,
            profit=design.profit,
            ticket_price=design.ticket_price,
        )
    price = design.ticket_price
    gain = design.gain
    max_prize = gain.max_outcome + price
    edges = _decade_edges(max_prize)
    counts = np.zeros(edges.size, dtype=np.int64)
    zero_count = 0

    def bucket_of(prize: float) -> int:
        return int(np.searchsorted(edges, prize, side="left"))

    for w, cnt in design.loss_levels:
        if cnt == 0:
            continue
        prize = price + w
        if prize <= 0.0:  # exact zero by construction; clamp ulp undershoot
            zero_count += cnt
        else:
            counts[bucket_of(prize)] += cnt

    base_prize = gain.base_outcome + price
    counts[bucket_of(base_prize)] += gain.uniform_count

    j0 = gain.uniform_count
    tail_n = gain.n_plus - j0
    if tail_n > 0:
        if tail_n <= _STREAM_LIMIT:
            done = 0
            while done < tail_n:
                hi = min(done + 1_000_000, tail_n)
                prizes = gain.outcomes_slice(j0 + done + 1, j0 + hi) + price
                counts += np.bincount(
                    np.searchsorted(edges, prizes, side="left"), minlength=edges.size
                )
                done = hi
        else:
            # outcomes are nondecreasing in the index: locate each decade edge
            # by bisection instead of streaming every ticket
            def count_le(x: float) -> int:
                lo, hi = j0, gain.n_plus
                if gain.outcome(j0 + 1) + price > x:
                    return 0
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if gain.outcome(mid) + price <= x:
                        lo = mid
                    else:
                        hi = mid - 1
                return lo - j0
            below = 0
            for i, e in enumerate(edges):
                le = count_le(e) if e < max_prize else tail_n
                counts[i] += le - below
                below = le

    total = zero_count + int(counts.sum())
    if total != design.n:
        raise AssertionError(f"bucket counts sum to {total}, expected {design.n}")
    buckets = []
    for i, e in enumerate(edges):
        if counts[i]:
            lo = 0.0 if i == 0 else float(edges[i - 1])
            buckets.append((lo, float(e), int(counts[i])))
    return PrizeTable(
        n=design.n,
        buckets=tuple(buckets),
        zero_count=zero_count,
        max_prize=max_prize,
        gain_ratio=gain.n_plus / design.n,
        profit=design.profit,
        ticket_price=price,
    )


def max_buyer_utility(params: CptParams, n: int, profit_floor: float) -> float:
    """Largest utility floor eps whose optimal design still clears
    profit_floor, found by bisection on the (decreasing) profit curve."""
    base = design_optimal(params, n)
    if base.status != STATUS_FINITE:
        raise ValueError(f"base design is {base.status}; no finite profit to trade away")
    scale = max(1.0, abs(base.profit))
    if profit_floor > base.profit * (1.0 + 1e-12) + 1e-12 * scale:
        raise ValueError(
            f"profit floor {profit_floor} exceeds the optimal profit {base.profit}"
        )

    def profit_at(e: float) -> float:
        return design_optimal(params, n, eps=e).profit

    lo, hi = 0.0, max(1.0, base.v_star)
    p_prev = base.profit
    while True:
        p_hi = profit_at(hi)
        if p_hi > p_prev + 1e-9 * scale:
            raise AssertionError("profit failed to decrease with the utility floor")
        if p_hi < profit_floor:
            break
        lo, p_prev = hi, p_hi
        hi *= 2.0
        if hi > 1e300:
            raise AssertionError("profit never fell below the floor")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if profit_at(mid) >= profit_floor:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * max(1.0, hi):
            break
    return lo
