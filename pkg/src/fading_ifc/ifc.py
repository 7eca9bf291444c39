"""Sum-capacities and achievable schemes for fading interference sub-classes.

Each operation targets one regime of the two-user ergodic fading
Gaussian interference channel.  Very strong channels get the exact
rectangle capacity at per-link waterfilling; uniformly strong channels
reduce to the compound-MAC case machinery with the cross-link sum
bound removed; uniformly weak one-sided channels maximize a
treat-interference-as-noise rate; uniformly mixed channels cap the
pooled rate at the strong receiver with the weak side's bound; the
two-sided weak case only gets an upper bound.  A rate-splitting scheme
(private/common power split at the interfered receiver) and separable
and time-duplexing baselines cover achievability on one-sided hybrids.

Several objectives here are not concave (dividing by interference
terms introduces convex pieces), so those maximizers run a fixed
battery of deterministic starts through projected ascent, refine the
winner with an SLSQP epigraph solve, and for small state counts sweep
a budget-face grid; returned values are certified by KKT residuals or
by the grid itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import optimize as sciopt

from .channel import (
    ConvergenceError,
    FadingProcess,
    PowerBudget,
    PowerPolicy,
    PreconditionError,
)
from .allocate import (
    LN2,
    PerStateMinRate,
    RateObjective,
    _epigraph_polish,
    _project_capped,
    _waterfill_powers,
    kkt_residual,
)
from .classify import evs_condition, um_orientation
from .cmac import _sum_capacity_engine


def _swapped_budget(budget: PowerBudget) -> PowerBudget:
    return PowerBudget(p1_bar=budget.p2_bar, p2_bar=budget.p1_bar)


class NotEVS(PreconditionError):
    """The very-strong capacity formula does not apply to this channel."""


class NotUniformlyStrong(PreconditionError):
    """Some state fails the strong comparison on a live cross link."""


class NotUniformlyWeak(PreconditionError):
    """Some state fails the strict weak comparison on a cross link."""


class NotUniformlyMixed(PreconditionError):
    """No uniform mixed orientation holds across the states."""


class MinimaxCase(Enum):
    Case1_S1smaller = "Case1_S1smaller"
    Case2_S2smaller = "Case2_S2smaller"
    Case3_equal = "Case3_equal"


@dataclass(frozen=True)
class HkAllocation:
    """Power policy plus the per-state private-power fraction of user 2.

    alpha_h * P2(h) rides as private power only receiver 1 must not
    decode; the rest is common and decoded by both receivers.
    """

    policy: PowerPolicy
    alpha: tuple[float, ...]

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != len(self.policy.p1):
            raise PreconditionError(
                f"alpha has {len(alpha)} entries for {len(self.policy.p1)} states"
            )
        for i, a in enumerate(alpha):
            if not math.isfinite(a) or a < -1e-12 or a > 1.0 + 1e-12:
                raise PreconditionError(f"alpha[{i}] must lie in [0, 1], got {a!r}")
        object.__setattr__(self, "alpha", tuple(min(1.0, max(0.0, a)) for a in alpha))

    @property
    def private_powers(self) -> np.ndarray:
        _, p2 = self.policy.arrays
        return np.asarray(self.alpha) * p2

    @property
    def common_powers(self) -> np.ndarray:
        _, p2 = self.policy.arrays
        return (1.0 - np.asarray(self.alpha)) * p2


def _erate(p: np.ndarray, x: np.ndarray) -> float:
    return float(p @ np.log2(1.0 + x))


def _solo_powers(gains: np.ndarray, probs: np.ndarray, budget: float) -> np.ndarray:
    if budget <= 0.0 or not (gains > 0).any():
        return np.zeros_like(gains)
    powers, _ = _waterfill_powers(gains, probs, budget)
    return powers


def _require_receiver1_sided(process: FadingProcess) -> None:
    """Interference must enter at receiver 1 only (g21 = 0 everywhere)."""
    g11, g12, g21, g22 = process.gain_arrays
    if np.any(g21 != 0):
        if not np.any(g12 != 0):
            raise PreconditionError(
                "interference enters at receiver 2, not receiver 1; "
                "apply process.swap_users() first"
            )
        raise PreconditionError(
            "process is two-sided: both cross links carry nonzero gain in some state"
        )


def interference_free_outer_bound(process: FadingProcess, budget: PowerBudget) -> float:
    """Sum of the two single-link waterfilling rates, in bits.

    No achievable pair can beat the interference-free links, so every
    scheme's sum rate sits below this number.
    """
    g11, _, _, g22 = process.gain_arrays
    p = process.prob_array
    total = 0.0
    for g, b in ((g11, budget.p1_bar), (g22, budget.p2_bar)):
        powers = _solo_powers(g, p, b)
        total += _erate(p, g * powers)
    return total


def evs_sum_capacity(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, PowerPolicy, tuple[float, float]]:
    """Exact sum capacity when interference is ergodically very strong.

    Both users waterfill their own link as if alone; the capacity
    region is the rectangle of the two single-link rates, and the sum
    capacity is the rectangle corner.  Raises NotEVS when the defining
    condition fails.
    """
    check = evs_condition(process, budget)
    if not check.holds:
        raise NotEVS(
            "very-strong condition fails: interference-free sum "
            f"{check.lhs:.6g} bits is not below the weakest interfered "
            f"receiver's pooled rate {check.rhs:.6g} bits"
        )
    g11, _, _, g22 = process.gain_arrays
    p = process.prob_array
    x1 = _solo_powers(g11, p, budget.p1_bar)
    x2 = _solo_powers(g22, p, budget.p2_bar)
    r1 = _erate(p, g11 * x1)
    r2 = _erate(p, g22 * x2)
    return r1 + r2, PowerPolicy.from_arrays(x1, x2), (r1, r2)


def _strong_bound_flags(process: FadingProcess) -> tuple[bool, bool]:
    """Check the uniformly strong precondition; return the live sum bounds.

    A cross link that is identically zero imposes no decoding burden on
    its receiver, so that receiver's sum bound drops; the surviving
    cross links must dominate the paired direct links in every state.
    """
    g11, g12, g21, g22 = process.gain_arrays
    cross1_live = bool(np.any(g21 != 0))
    cross2_live = bool(np.any(g12 != 0))
    if not (cross1_live or cross2_live):
        raise NotUniformlyStrong("no live cross link; the channel has no interference")
    if cross1_live:
        bad = np.nonzero(g21 < g11)[0]
        if bad.size:
            i = int(bad[0])
            raise NotUniformlyStrong(
                f"state {i}: cross gain into receiver 2 ({g21[i]:g}) is below "
                f"the direct gain {g11[i]:g}"
            )
    if cross2_live:
        bad = np.nonzero(g12 < g22)[0]
        if bad.size:
            i = int(bad[0])
            raise NotUniformlyStrong(
                f"state {i}: cross gain into receiver 1 ({g12[i]:g}) is below "
                f"the direct gain {g22[i]:g}"
            )
    return cross1_live, cross2_live


def us_sum_capacity(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, PowerPolicy]:
    """Sum capacity of a uniformly strong channel via the case machinery.

    Strong interference lets both receivers decode both messages, so
    the channel behaves as a compound MAC whose cross-link sum bound
    never binds; the ordered case search runs with that bound removed
    (and with a clean receiver's sum bound removed in the one-sided
    variant).
    """
    use_s3a, use_s3b = _strong_bound_flags(process)
    value, policy, _ = _sum_capacity_engine(
        process, budget, use_s2=False, use_s3a=use_s3a, use_s3b=use_s3b
    )
    return value, policy


def _per_state_epigraph_polish(
    probs: np.ndarray,
    branches: Sequence[Sequence[tuple[float, np.ndarray, np.ndarray]]],
    b1: float,
    b2: float,
    x1: np.ndarray,
    x2: np.ndarray,
    maxiter: int = 300,
) -> tuple[np.ndarray, np.ndarray] | None:
    """SLSQP solve of max E[t_h] s.t. t_h below every per-state branch."""
    n = probs.shape[0]

    def branch_vals(z1, z2, rows):
        acc = np.zeros(n)
        for w, a, b in rows:
            acc += w * np.log1p(a * z1 + b * z2)
        return acc / LN2

    t0 = np.min(
        [branch_vals(x1, x2, rows) for rows in branches], axis=0
    )
    z0 = np.concatenate([x1, x2, t0])

    def fun(z):
        return -float(probs @ z[2 * n :])

    gfix = np.concatenate([np.zeros(2 * n), -probs])

    def jac(z):
        return gfix

    cons = []
    for rows in branches:

        def cval(z, rows=rows):
            return branch_vals(z[:n], z[n : 2 * n], rows) - z[2 * n :]

        def cjac(z, rows=rows):
            out = np.zeros((n, 3 * n))
            z1, z2 = z[:n], z[n : 2 * n]
            for w, a, b in rows:
                den = (1.0 + a * z1 + b * z2) * LN2
                out[np.arange(n), np.arange(n)] += w * a / den
                out[np.arange(n), n + np.arange(n)] += w * b / den
            out[np.arange(n), 2 * n + np.arange(n)] = -1.0
            return out

        cons.append({"type": "ineq", "fun": cval, "jac": cjac})
    for col, cap in ((0, b1), (1, b2)):

        def bval(z, col=col, cap=cap):
            return cap - float(probs @ z[col * n : (col + 1) * n])

        def bjac(z, col=col):
            row = np.zeros(3 * n)
            row[col * n : (col + 1) * n] = -probs
            return row

        cons.append({"type": "ineq", "fun": bval, "jac": bjac})
    bounds = [(0.0, None)] * (2 * n) + [(None, None)] * n
    try:
        res = sciopt.minimize(
            fun,
            z0,
            jac=jac,
            bounds=bounds,
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-12, "maxiter": maxiter},
        )
    except (ValueError, OverflowError):
        return None
    q1 = np.maximum(res.x[:n], 0.0)
    q2 = np.maximum(res.x[n : 2 * n], 0.0)
    for q, cap in ((q1, b1), (q2, b2)):
        spend = float(probs @ q)
        if spend > cap > 0:
            q *= cap / spend
        elif spend > cap:
            q[:] = 0.0
    return q1, q2


def us_separable_sum_rate(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, PowerPolicy]:
    """Sum rate when each fading state is coded as its own channel.

    Every state is treated as a standalone strong interference channel
    whose code must respect the power budgets by itself, so each state
    transmits at full budget (its sum rate grows in both powers) and
    the value is the expectation of the per-state minima of the live
    receiver sums and the direct-link sum.  Always at or below
    us_sum_capacity, which pools power and codes across states.
    """
    use_s3a, use_s3b = _strong_bound_flags(process)
    g11, g12, g21, g22 = process.gain_arrays
    p = process.prob_array
    zero = np.zeros_like(p)
    branches = []
    if use_s3b:
        branches.append([(1.0, g11, g12)])
    if use_s3a:
        branches.append([(1.0, g21, g22)])
    branches.append([(1.0, g11, zero), (1.0, zero, g22)])
    objective = PerStateMinRate(p, branches)
    x1 = np.full(process.n_states, budget.p1_bar)
    x2 = np.full(process.n_states, budget.p2_bar)
    return objective.value(x1, x2), PowerPolicy.from_arrays(x1, x2)


def _face_points(probs: np.ndarray, cap: float, m: int, lo=None, hi=None) -> np.ndarray:
    """Vectors x >= 0 with probs @ x = cap, gridded over the free coords.

    lo/hi optionally restrict each free coordinate's sweep (used by the
    refinement passes).  Shape (K, n).
    """
    n = probs.shape[0]
    if cap <= 0:
        return np.zeros((1, n))
    if n == 1:
        return np.array([[cap / probs[0]]])
    axes = []
    for i in range(n - 1):
        full_hi = cap / probs[i]
        a = 0.0 if lo is None else max(0.0, lo[i])
        b = full_hi if hi is None else min(full_hi, hi[i])
        if b < a:
            a, b = b, b
        axes.append(np.linspace(a, b, m))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    last = (cap - mesh @ probs[:-1]) / probs[-1]
    keep = last >= -1e-12
    mesh, last = mesh[keep], np.maximum(last[keep], 0.0)
    return np.concatenate([mesh, last[:, None]], axis=1)


def _batch_min_value(objectives, X1: np.ndarray, X2: np.ndarray, probs: np.ndarray):
    """min over objectives of their fading-averaged value, per batch row.

    Per-state-minimum objectives average their pointwise branch minimum
    instead of a plain term sum.
    """
    total = None
    for obj in objectives:
        if hasattr(obj, "branches"):
            per_state = None
            for rows in obj.branches:
                acc = np.zeros_like(X1)
                for w, a, b in rows:
                    acc += w * np.log1p(X1 * a + X2 * b)
                per_state = acc if per_state is None else np.minimum(per_state, acc)
            vals = (per_state @ probs) / LN2
        else:
            acc = np.zeros(X1.shape[0])
            for w, a, b in obj.terms:
                acc += w * (np.log1p(X1 * a + X2 * b) @ probs)
            vals = acc / LN2
        total = vals if total is None else np.minimum(total, vals)
    return total


def _grid_minimax(process, budget, objectives, m_coarse: int, refines: int = 2):
    """Budget-face grid sweep of min(objectives); None when too large.

    Valid only when every objective is nondecreasing in each power, so
    an optimum exists with both budgets spent.
    """
    p = process.prob_array
    n = process.n_states
    if (n - 1) * 2 > 4:
        return None
    b1, b2 = budget.p1_bar, budget.p2_bar
    lo1 = hi1 = lo2 = hi2 = None
    best = (-np.inf, None, None)
    m = m_coarse
    for _ in range(refines + 1):
        F1 = _face_points(p, b1, m, lo1, hi1)
        F2 = _face_points(p, b2, m, lo2, hi2)
        X1 = np.repeat(F1, F2.shape[0], axis=0)
        X2 = np.tile(F2, (F1.shape[0], 1))
        vals = _batch_min_value(objectives, X1, X2, p)
        i = int(np.argmax(vals))
        if vals[i] > best[0]:
            best = (float(vals[i]), X1[i].copy(), X2[i].copy())
        if n == 1:
            break
        c1, c2 = best[1], best[2]
        span1 = (b1 / np.minimum.reduce(p)) / max(m - 1, 1)
        span2 = (b2 / np.minimum.reduce(p)) / max(m - 1, 1)
        lo1, hi1 = c1[:-1] - span1, c1[:-1] + span1
        lo2, hi2 = c2[:-1] - span2, c2[:-1] + span2
        m = max(9, m // 2 + 1)
    return best


_ASCENT_ITERS = 400


def _projected_ascent(process, budget, objectives, x1, x2, iters=_ASCENT_ITERS):
    """Diminishing-step supergradient ascent on min(objectives)."""
    p = process.prob_array
    b1, b2 = budget.p1_bar, budget.p2_bar
    x1 = x1.copy()
    x2 = x2.copy()
    best = (-np.inf, x1.copy(), x2.copy())
    scale = max(b1, b2, 1e-3)
    for t in range(1, iters + 1):
        vals = [o.value(x1, x2) for o in objectives]
        i = int(np.argmin(vals))
        v = vals[i]
        if v > best[0]:
            best = (v, x1.copy(), x2.copy())
        g1, g2 = objectives[i].gradient(x1, x2)
        eta = scale / math.sqrt(t)
        x1 = _project_capped(x1 + eta * g1 / p, p, b1)
        x2 = _project_capped(x2 + eta * g2 / p, p, b2)
    return best


def _deterministic_starts(process, budget):
    """Eight fixed start policies: uniform, per-link waterfilling, mixes."""
    g11, _, _, g22 = process.gain_arrays
    p = process.prob_array
    n = process.n_states
    b1, b2 = budget.p1_bar, budget.p2_bar
    u1 = np.full(n, b1)
    u2 = np.full(n, b2)
    w1 = _solo_powers(g11, p, b1)
    w2 = _solo_powers(g22, p, b2)
    return [
        (u1, u2),
        (w1, w2),
        (w1, u2),
        (u1, w2),
        (u1, 0.5 * u2),
        (w1, 0.5 * u2),
        (u1, np.zeros(n)),
        (w1, np.zeros(n)),
    ]


def _minimax_driver(process, budget, objectives, m_coarse=33):
    """Shared search for min-of-smooth-rate objectives that need not be concave.

    Multistart projected ascent, SLSQP epigraph polish of every start's
    endpoint, and a budget-face grid for small state counts; returns
    (value, x1, x2) for the best candidate found.
    """
    p = process.prob_array
    b1, b2 = budget.p1_bar, budget.p2_bar

    def value_at(x1, x2):
        return min(o.value(x1, x2) for o in objectives)

    best = (-np.inf, np.zeros_like(p), np.zeros_like(p))
    for s1, s2 in _deterministic_starts(process, budget):
        v, x1, x2 = _projected_ascent(process, budget, objectives, s1, s2)
        out = _epigraph_polish(p, objectives, b1, b2, x1, x2)
        if out is not None:
            vp = value_at(*out)
            if vp > v:
                v, (x1, x2) = vp, out
        if v > best[0]:
            best = (v, x1, x2)
    grid = _grid_minimax(process, budget, objectives, m_coarse)
    if grid is not None and grid[0] > best[0]:
        gx1, gx2 = grid[1], grid[2]
        out = _epigraph_polish(p, objectives, b1, b2, gx1, gx2)
        if out is not None and value_at(*out) > grid[0]:
            best = (value_at(*out), *out)
        else:
            best = grid
    return best


def _weak_link_check(g_cross: np.ndarray, g_direct: np.ndarray, into: str) -> None:
    bad = np.nonzero(~(g_cross < g_direct))[0]
    if bad.size:
        i = int(bad[0])
        raise NotUniformlyWeak(
            f"state {i}: interfering gain into {into} ({g_cross[i]:g}) is not "
            f"below the paired direct gain {g_direct[i]:g}"
        )


def _waterfill_rows(gains: np.ndarray, probs: np.ndarray, cap: float) -> np.ndarray:
    """Row-wise waterfilling: each row of gains gets its own water level."""
    m, n = gains.shape
    if cap <= 0:
        return np.zeros((m, n))
    with np.errstate(divide="ignore"):
        inv = np.where(gains > 0, 1.0 / np.where(gains > 0, gains, 1.0), np.inf)
    lo = np.zeros(m)
    finite = np.where(np.isfinite(inv), inv, 0.0)
    hi = cap / np.minimum.reduce(probs) + finite.max(axis=1) + 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        spend = np.maximum(mid[:, None] - inv, 0.0) @ probs
        high = spend > cap
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    level = 0.5 * (lo + hi)
    return np.maximum(level[:, None] - inv, 0.0)


def uw1_sum_capacity(
    process: FadingProcess, budget: PowerBudget, side: int = 1
) -> tuple[float, PowerPolicy]:
    """Sum capacity of a one-sided uniformly weak channel.

    The interfered receiver treats the crossing signal as noise:
    maximize E[C(g11 P1 / (1 + g12 P2))] + E[C(g22 P2)] (side 1; user
    indices swap for side 2).  For fixed P2 the optimal P1 is a
    waterfill over the effective gains, which makes an exhaustive sweep
    of the P2 budget face affordable for small state counts; the
    returned policy is a stationary point with KKT residual at most
    1e-6.
    """
    if side not in (1, 2):
        raise ValueError(f"side must be 1 or 2, got {side!r}")
    if side == 2:
        value, policy = uw1_sum_capacity(process.swap_users(), _swapped_budget(budget), 1)
        return value, PowerPolicy(p1=policy.p2, p2=policy.p1)
    _require_receiver1_sided(process)
    g11, g12, _, g22 = process.gain_arrays
    _weak_link_check(g12, g22, "receiver 1")
    p = process.prob_array
    n = process.n_states
    b1, b2 = budget.p1_bar, budget.p2_bar
    zero = np.zeros(n)
    objective = RateObjective(
        p, [(1.0, g11, g12), (-1.0, zero, g12), (1.0, zero, g22)]
    )

    def value_for_p2(X2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        eff = g11 / (1.0 + g12 * X2)
        X1 = _waterfill_rows(eff, p, b1)
        vals = (np.log1p(eff * X1) @ p + np.log1p(g22 * X2) @ p) / LN2
        return vals, X1

    # The objective strictly increases in every power for weak states,
    # so both budgets bind and the P2 face is exhaustive.
    best_v, best_x1, best_x2 = _minimax_driver(process, budget, [objective])
    if n <= 4:
        lo = hi = None
        m = 17 if n == 4 else 33
        for _ in range(3):
            F2 = _face_points(p, b2, m, lo, hi)
            vals, X1 = value_for_p2(F2)
            i = int(np.argmax(vals))
            if vals[i] > best_v:
                best_v, best_x1, best_x2 = float(vals[i]), X1[i].copy(), F2[i].copy()
            if n == 1:
                break
            span = (b2 / np.minimum.reduce(p)) / max(m - 1, 1)
            lo, hi = F2[i][:-1] - span, F2[i][:-1] + span
            m = max(11, m // 2 + 1)
    out = _epigraph_polish(p, [objective], b1, b2, best_x1, best_x2)
    if out is not None and objective.value(*out) > best_v:
        best_v, (best_x1, best_x2) = objective.value(*out), out
    policy = PowerPolicy.from_arrays(best_x1, best_x2)
    res = kkt_residual(process, policy, objective, budget)
    if res > 1e-6:
        out = _epigraph_polish(p, [objective], b1, b2, best_x1, best_x2, maxiter=800)
        if out is not None and objective.value(*out) >= best_v - 1e-9:
            cand = PowerPolicy.from_arrays(*out)
            if kkt_residual(process, cand, objective, budget) < res:
                policy = cand
                best_v = objective.value(*out)
    return best_v, policy


def um_sum_capacity(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, PowerPolicy]:
    """Sum capacity of a uniformly mixed channel.

    With user 1's cross link weak and user 2's strong in every state,
    the sum capacity is the max over policies of the smaller of the
    strong receiver's pooled rate and the weak side's
    treat-as-noise bound.
    """
    orient = um_orientation(process)
    if orient is None:
        raise NotUniformlyMixed(
            "no uniform mixed orientation: need g11 > g21 and g12 >= g22 in "
            "every state, or the mirror image"
        )
    if orient < 0:
        value, policy = um_sum_capacity(process.swap_users(), _swapped_budget(budget))
        return value, PowerPolicy(p1=policy.p2, p2=policy.p1)
    g11, g12, g21, g22 = process.gain_arrays
    p = process.prob_array
    zero = np.zeros_like(p)
    pooled_rx1 = RateObjective(p, [(1.0, g11, g12)])
    weak_side_rx2 = RateObjective(
        p, [(1.0, g21, g22), (-1.0, g21, zero), (1.0, g11, zero)]
    )
    objectives = [pooled_rx1, weak_side_rx2]
    best_v, x1, x2 = _minimax_driver(process, budget, objectives)
    return best_v, PowerPolicy.from_arrays(x1, x2)


def uw2_upper_bound(process: FadingProcess, budget: PowerBudget) -> float:
    """Sum-capacity upper bound for two-sided uniformly weak channels.

    Max over policies of the smaller of the two treat-as-noise bounds;
    a genie argument shows no scheme can beat either one.
    """
    g11, g12, g21, g22 = process.gain_arrays
    _weak_link_check(g12, g22, "receiver 1")
    _weak_link_check(g21, g11, "receiver 2")
    p = process.prob_array
    zero = np.zeros_like(p)
    weak_rx1 = RateObjective(p, [(1.0, g11, g12), (-1.0, zero, g12), (1.0, zero, g22)])
    weak_rx2 = RateObjective(p, [(1.0, g21, g22), (-1.0, g21, zero), (1.0, g11, zero)])
    best_v, _, _ = _minimax_driver(process, budget, [weak_rx1, weak_rx2])
    return best_v


def hk_sum_rates(process: FadingProcess, allocation: HkAllocation) -> tuple[float, float]:
    """The two competing sum rates of the rate-splitting scheme.

    S1 serves user 1 around the private interference and user 2 at full
    power; S2 charges user 2's private part at receiver 2 and the rest
    jointly at receiver 1.  The scheme achieves min(S1, S2); at
    alpha = 1 the two coincide identically.
    """
    _require_receiver1_sided(process)
    g11, g12, _, g22 = process.gain_arrays
    p = process.prob_array
    x1, x2 = allocation.policy.arrays
    q = np.asarray(allocation.alpha) * x2
    den = 1.0 + g12 * q
    s1 = _erate(p, g11 * x1 / den) + _erate(p, g22 * x2)
    s2 = _erate(p, g22 * q) + _erate(p, (g11 * x1 + g12 * (x2 - q)) / den)
    return s1, s2


def hk_region_bounds(
    process: FadingProcess, allocation: HkAllocation
) -> tuple[float, float, float, float]:
    """Fading-averaged rate caps of the rate-splitting region.

    Returns (r1_cap, r2_cap_direct, r2_cap_split, sum_cap): user 1
    decoding around private interference, user 2's clean direct cap,
    user 2 split across the two receivers, and the joint bound at
    receiver 1.
    """
    _require_receiver1_sided(process)
    g11, g12, _, g22 = process.gain_arrays
    p = process.prob_array
    x1, x2 = allocation.policy.arrays
    q = np.asarray(allocation.alpha) * x2
    den = 1.0 + g12 * q
    r1_cap = _erate(p, g11 * x1 / den)
    r2_cap_direct = _erate(p, g22 * x2)
    r2_cap_split = _erate(p, g22 * q) + _erate(p, g12 * (x2 - q) / den)
    sum_cap = _erate(p, g22 * q) + _erate(p, (g11 * x1 + g12 * (x2 - q)) / den)
    return r1_cap, r2_cap_direct, r2_cap_split, sum_cap


def _hk_values(g11, g12, g22, p, x1, x2, q):
    s1 = (np.log1p(g11 * x1 + g12 * q) @ p - np.log1p(g12 * q) @ p
          + np.log1p(g22 * x2) @ p) / LN2
    s2 = (np.log1p(g22 * q) @ p + np.log1p(g11 * x1 + g12 * x2) @ p
          - np.log1p(g12 * q) @ p) / LN2
    return s1, s2


def _hk_gradients(g11, g12, g22, p, x1, x2, q, which: int):
    d1 = 1.0 + g11 * x1 + g12 * q
    dq = 1.0 + g12 * q
    if which == 1:
        gx1 = p * g11 / d1
        gx2 = p * g22 / (1.0 + g22 * x2)
        gq = p * g12 / d1 - p * g12 / dq
    else:
        d2 = 1.0 + g11 * x1 + g12 * x2
        gx1 = p * g11 / d2
        gx2 = p * g12 / d2
        gq = p * g22 / (1.0 + g22 * q) - p * g12 / dq
    return gx1 / LN2, gx2 / LN2, gq / LN2


def _project_wedge(y2: np.ndarray, yq: np.ndarray, free_q: np.ndarray,
                   probs: np.ndarray, cap: float) -> tuple[np.ndarray, np.ndarray]:
    """Joint projection onto {0 <= q <= x2 (q = 0 where not free), p@x2 <= cap}."""

    def wedge(a, b):
        u = np.where(b <= 0, np.maximum(a, 0.0), a)
        v = np.where(b <= 0, 0.0, b)
        over = (v > u) & (b > 0)
        w = np.maximum(0.5 * (a + b), 0.0)
        u = np.where(over, w, np.maximum(u, 0.0))
        v = np.where(over, w, np.clip(v, 0.0, np.maximum(u, 0.0)))
        v = np.where(free_q, v, 0.0)
        return u, v

    u, v = wedge(y2, yq)
    if probs @ u <= cap + 1e-15:
        return u, v
    # The on-line region takes u = (a + b)/2, so theta must absorb yq too.
    lo = 0.0
    hi = float((np.max(np.abs(y2)) + np.max(np.abs(yq))) / np.min(probs) + 1.0)
    for _ in range(90):
        th = 0.5 * (lo + hi)
        u, v = wedge(y2 - th * probs, yq)
        if probs @ u > cap:
            lo = th
        else:
            hi = th
    u, v = wedge(y2 - hi * probs, yq)
    return u, v


def _hk_slsqp(g11, g12, g22, p, b1, b2, free_q, x1, x2, q, maxiter=300):
    """Epigraph SLSQP over (P1, P2, q, t): maximize t under both sum rates."""
    n = p.shape[0]
    s1, s2 = _hk_values(g11, g12, g22, p, x1, x2, q)
    z0 = np.concatenate([x1, x2, q, [min(s1, s2)]])

    def fun(z):
        return -z[-1]

    gfix = np.zeros(3 * n + 1)
    gfix[-1] = -1.0

    def jac(z):
        return gfix

    def make_scon(which):
        def val(z, which=which):
            s1, s2 = _hk_values(g11, g12, g22, p, z[:n], z[n:2*n], z[2*n:3*n])
            return (s1 if which == 1 else s2) - z[-1]

        def jrow(z, which=which):
            gx1, gx2, gq = _hk_gradients(
                g11, g12, g22, p, z[:n], z[n:2*n], z[2*n:3*n], which
            )
            return np.concatenate([gx1, gx2, gq, [-1.0]])

        return {"type": "ineq", "fun": val, "jac": jrow}

    cons = [make_scon(1), make_scon(2)]

    def wedge_val(z):
        return z[n:2*n] - z[2*n:3*n]

    wjac = np.zeros((n, 3 * n + 1))
    wjac[np.arange(n), n + np.arange(n)] = 1.0
    wjac[np.arange(n), 2 * n + np.arange(n)] = -1.0
    cons.append({"type": "ineq", "fun": wedge_val, "jac": lambda z: wjac})
    for lo_idx, cap in ((0, b1), (1, b2)):

        def bval(z, lo_idx=lo_idx, cap=cap):
            return cap - float(p @ z[lo_idx * n : (lo_idx + 1) * n])

        def bjac(z, lo_idx=lo_idx):
            row = np.zeros(3 * n + 1)
            row[lo_idx * n : (lo_idx + 1) * n] = -p
            return row

        cons.append({"type": "ineq", "fun": bval, "jac": bjac})
    bounds = [(0.0, None)] * (2 * n)
    bounds += [(0.0, None) if free_q[i] else (0.0, 0.0) for i in range(n)]
    bounds += [(None, None)]
    try:
        res = sciopt.minimize(
            fun, z0, jac=jac, bounds=bounds, constraints=cons,
            method="SLSQP", options={"ftol": 1e-12, "maxiter": maxiter},
        )
    except (ValueError, OverflowError):
        return None
    x1n = np.maximum(res.x[:n], 0.0)
    x2n = np.maximum(res.x[n:2*n], 0.0)
    qn = np.clip(np.where(free_q, res.x[2*n:3*n], 0.0), 0.0, x2n)
    for arr, cap in ((x1n, b1), (x2n, b2)):
        spend = float(p @ arr)
        if spend > cap > 0:
            arr *= cap / spend
        elif spend > cap:
            arr[:] = 0.0
    qn = np.minimum(qn, x2n)
    return x1n, x2n, qn


def _hk_generic(process, budget) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Multistart search over (P1, P2, private power) for min(S1, S2)."""
    g11, g12, _, g22 = process.gain_arrays
    p = process.prob_array
    n = process.n_states
    b1, b2 = budget.p1_bar, budget.p2_bar
    strong = g12 >= g22
    free_q = ~strong

    def value(x1, x2, q):
        return min(_hk_values(g11, g12, g22, p, x1, x2, q))

    best = (-np.inf, np.zeros(n), np.zeros(n), np.zeros(n))

    def consider(x1, x2, q):
        nonlocal best
        v = value(x1, x2, q)
        if v > best[0]:
            best = (v, x1.copy(), x2.copy(), q.copy())

    def ascend(x1, x2, q, iters=_ASCENT_ITERS):
        x1, x2, q = x1.copy(), x2.copy(), q.copy()
        scale = max(b1, b2, 1e-3)
        for t in range(1, iters + 1):
            s1, s2 = _hk_values(g11, g12, g22, p, x1, x2, q)
            which = 1 if s1 <= s2 else 2
            consider(x1, x2, q)
            gx1, gx2, gq = _hk_gradients(g11, g12, g22, p, x1, x2, q, which)
            eta = scale / math.sqrt(t)
            x1 = _project_capped(x1 + eta * gx1 / p, p, b1)
            x2, q = _project_wedge(x2 + eta * gx2 / p, q + eta * gq / p, free_q, p, b2)
        return x1, x2, q

    for s1p, s2p in _deterministic_starts(process, budget)[:4]:
        for frac in (1.0, 0.5):
            q0 = np.where(free_q, frac * s2p, 0.0)
            x1, x2, q = ascend(s1p, s2p, q0)
            out = _hk_slsqp(g11, g12, g22, p, b1, b2, free_q, x1, x2, q)
            if out is not None:
                consider(*out)
            consider(x1, x2, q)
    if n <= 2:
        # Exhaustive sweep: budget faces for the powers (both sum rates
        # increase in every power), private power as a fraction.
        n_free = int(free_q.sum())
        lo1 = hi1 = lo2 = hi2 = None
        m = 21
        fr_axes = [np.linspace(0.0, 1.0, 11)] * n_free
        for _ in range(3):
            F1 = _face_points(p, b1, m, lo1, hi1)
            F2 = _face_points(p, b2, m, lo2, hi2)
            combos = [
                np.stack(g, axis=-1).reshape(-1, n_free)
                for g in [np.meshgrid(*fr_axes, indexing="ij")]
            ][0] if n_free else np.zeros((1, 0))
            X1 = np.repeat(np.repeat(F1, F2.shape[0], 0), combos.shape[0], 0)
            X2 = np.tile(np.repeat(F2, combos.shape[0], 0), (F1.shape[0], 1))
            FR = np.tile(combos, (F1.shape[0] * F2.shape[0], 1))
            Q = np.zeros_like(X2)
            if n_free:
                Q[:, free_q] = FR * X2[:, free_q]
            s1 = (np.log1p(g11 * X1 + g12 * Q) @ p - np.log1p(g12 * Q) @ p
                  + np.log1p(g22 * X2) @ p) / LN2
            s2 = (np.log1p(g22 * Q) @ p + np.log1p(g11 * X1 + g12 * X2) @ p
                  - np.log1p(g12 * Q) @ p) / LN2
            vals = np.minimum(s1, s2)
            i = int(np.argmax(vals))
            consider(X1[i], X2[i], Q[i])
            if n == 1 and n_free == 0:
                break
            c1, c2 = best[1], best[2]
            span1 = (b1 / np.min(p)) / max(m - 1, 1)
            span2 = (b2 / np.min(p)) / max(m - 1, 1)
            if n > 1:
                lo1, hi1 = c1[:-1] - span1, c1[:-1] + span1
                lo2, hi2 = c2[:-1] - span2, c2[:-1] + span2
            if n_free:
                with np.errstate(invalid="ignore", divide="ignore"):
                    fbest = np.where(best[2][free_q] > 0,
                                     best[3][free_q] / best[2][free_q], 0.0)
                fr_axes = [
                    np.linspace(max(0.0, f - 1.5 / m), min(1.0, f + 1.5 / m), 9)
                    for f in np.atleast_1d(fbest)
                ]
            m = max(9, m // 2 + 1)
        out = _hk_slsqp(g11, g12, g22, p, b1, b2, free_q, best[1], best[2], best[3])
        if out is not None:
            consider(*out)
    if not np.isfinite(best[0]):
        raise ConvergenceError("rate-splitting search found no finite candidate")
    return best


def _minimax_case(s1: float, s2: float, tol: float = 1e-7) -> MinimaxCase:
    if abs(s1 - s2) <= tol:
        return MinimaxCase.Case3_equal
    return MinimaxCase.Case1_S1smaller if s1 < s2 else MinimaxCase.Case2_S2smaller


def hk_optimize(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, HkAllocation, MinimaxCase]:
    """Best rate-splitting sum rate over policies and power splits.

    Strong states carry no private power (splitting never helps there);
    weak states search the full split range.  Three regimes shortcut to
    known answers: very strong channels return the interference-free
    optimum at zero split, all-strong channels reduce to the uniformly
    strong sum capacity, all-weak channels to the treat-as-noise sum
    capacity at full private power.
    """
    _require_receiver1_sided(process)
    g11, g12, _, g22 = process.gain_arrays
    p = process.prob_array
    n = process.n_states
    strong = g12 >= g22
    zeros = np.zeros(n)

    if evs_condition(process, budget).holds:
        x1 = _solo_powers(g11, p, budget.p1_bar)
        x2 = _solo_powers(g22, p, budget.p2_bar)
        s1, s2 = _hk_values(g11, g12, g22, p, x1, x2, zeros)
        if s1 < s2:
            alloc = HkAllocation(PowerPolicy.from_arrays(x1, x2), (0.0,) * n)
            return s1, alloc, MinimaxCase.Case1_S1smaller
    if bool(strong.all()):
        value, policy = us_sum_capacity(process, budget)
        x1, x2 = policy.arrays
        s1, s2 = _hk_values(g11, g12, g22, p, x1, x2, zeros)
        return value, HkAllocation(policy, (0.0,) * n), _minimax_case(s1, s2)
    if not bool(strong.any()):
        value, policy = uw1_sum_capacity(process, budget, side=1)
        return value, HkAllocation(policy, (1.0,) * n), MinimaxCase.Case3_equal

    value, x1, x2, q = _hk_generic(process, budget)
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = np.where(x2 > 0, q / np.where(x2 > 0, x2, 1.0), 0.0)
    alpha = np.clip(np.where(strong, 0.0, alpha), 0.0, 1.0)
    s1, s2 = _hk_values(g11, g12, g22, p, x1, x2, q)
    alloc = HkAllocation(PowerPolicy.from_arrays(x1, x2), tuple(alpha))
    return value, alloc, _minimax_case(s1, s2)


def separable_one_sided_baseline(
    process: FadingProcess, budget: PowerBudget
) -> tuple[float, HkAllocation]:
    """Independent coding per state with the natural split pattern.

    Weak states use full private power (treat as noise), strong states
    none (decode the interference); the objective is the expectation of
    the per-state minimum of the two split sum rates, maximized over
    policies.  Never exceeds the jointly coded optimum.
    """
    _require_receiver1_sided(process)
    g11, g12, _, g22 = process.gain_arrays
    p = process.prob_array
    n = process.n_states
    strong = g12 >= g22
    alpha = np.where(strong, 0.0, 1.0)
    zero = np.zeros(n)
    ga = g12 * alpha
    s1_rows = [(1.0, g11, ga), (-1.0, zero, ga), (1.0, zero, g22)]
    s2_rows = [(1.0, zero, g22 * alpha), (1.0, g11, g12), (-1.0, zero, ga)]
    objective = PerStateMinRate(p, [s1_rows, s2_rows])

    best = (-np.inf, np.zeros(n), np.zeros(n))
    for s1p, s2p in _deterministic_starts(process, budget):
        v, x1, x2 = _projected_ascent(process, budget, [objective], s1p, s2p)
        if v > best[0]:
            best = (v, x1, x2)
    if n <= 64:
        out = _per_state_epigraph_polish(
            p, objective.branches, budget.p1_bar, budget.p2_bar, best[1], best[2]
        )
        if out is not None and objective.value(*out) > best[0]:
            best = (objective.value(*out), *out)
    if n <= 3:
        grid = _grid_minimax(process, budget, [objective], 25)
        if grid is not None and grid[0] > best[0]:
            out = _per_state_epigraph_polish(
                p, objective.branches, budget.p1_bar, budget.p2_bar, grid[1], grid[2]
            )
            if out is not None and objective.value(*out) > grid[0]:
                best = (objective.value(*out), *out)
            else:
                best = grid
    policy = PowerPolicy.from_arrays(best[1], best[2])
    return best[0], HkAllocation(policy, tuple(alpha))


def tdm_baseline(process: FadingProcess, budget: PowerBudget) -> float:
    """Time-duplexing sum rate: each user active half the time at 2x power."""
    g11, _, _, g22 = process.gain_arrays
    p = process.prob_array
    return 0.5 * (
        _erate(p, g11 * 2.0 * budget.p1_bar) + _erate(p, g22 * 2.0 * budget.p2_bar)
    )
