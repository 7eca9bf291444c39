"""Constrained power optimization over discrete fading processes.

Three layers.  At the bottom, exact single-user waterfilling with the
water level found by bisection.  Above it, two-user opportunistic
waterfilling of the sum rate at one receiver, solved through its
Lagrangian dual and finished by block-coordinate ascent.  At the top, a
projected-supergradient maximizer for minima of concave fading-averaged
rate objectives, with a sequential-quadratic polish and a KKT residual
audit that works on any candidate policy.

Rates are bits per channel use.  Budgets are long-run averages: a
policy is feasible when E[P_k] <= budget_k + POWER_TOL and every
per-state power is nonnegative.  States where a user's gain is zero
never receive power from that user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize as sciopt

from .channel import (
    POWER_TOL,
    ConvergenceError,
    FadingProcess,
    PowerBudget,
    PowerPolicy,
    PreconditionError,
)

LN2 = math.log(2.0)

# Powers below this are treated as inactive in stationarity checks.
ACTIVE_TOL = 1e-9


@dataclass(frozen=True)
class WaterfillResult:
    """Outcome of single-user waterfilling.

    The policy stores the computed powers in user 1's column (the op is
    agnostic about which physical user the gains belong to); callers
    recombine columns as needed via ``powers``.
    """

    policy: PowerPolicy
    water_level: float
    achieved_rate: float

    @property
    def powers(self) -> np.ndarray:
        return self.policy.arrays[0]


@dataclass(frozen=True)
class OptimizerReport:
    """A policy, its objective value in bits, and optimality evidence."""

    policy: PowerPolicy
    value: float
    iterations: int
    kkt_residual: float
    converged: bool


def _waterfill_powers(
    gains: np.ndarray, probs: np.ndarray, budget: float, iters: int = 120
) -> tuple[np.ndarray, float]:
    """Bisect the water level nu so that E[(nu - 1/g)+] = budget.

    Requires budget > 0 and at least one positive gain; zero-gain states
    get zero power.  Spending is continuous and nondecreasing in nu, so
    plain bisection is exact to float precision at 120 halvings.
    """
    g = np.asarray(gains, dtype=float)
    p = np.asarray(probs, dtype=float)
    pos = g > 0
    inv = np.full_like(g, np.inf)
    inv[pos] = 1.0 / g[pos]
    q = float(p[pos].sum())
    lo = 0.0
    hi = budget / q + float(inv[pos].max()) + 1.0
    for _ in range(iters):
        nu = 0.5 * (lo + hi)
        spend = float(p @ np.maximum(nu - inv, 0.0))
        if spend > budget:
            hi = nu
        else:
            lo = nu
    nu = 0.5 * (lo + hi)
    return np.maximum(nu - inv, 0.0), nu


def waterfill(gain_dist: Iterable[tuple[float, float]], budget: float) -> WaterfillResult:
    """Waterfill one user's power over a discrete gain distribution.

    ``gain_dist`` is a sequence of (gain, probability) pairs whose
    probabilities are positive and sum to 1 within 1e-6.  Returns the
    per-state powers P(g) = max(water_level - 1/g, 0), the water level,
    and the achieved rate E[log2(1 + g P(g))].
    """
    pairs = [(float(g), float(q)) for g, q in gain_dist]
    if not pairs:
        raise PreconditionError("gain_dist must be non-empty")
    gains = np.array([g for g, _ in pairs], dtype=float)
    probs = np.array([q for _, q in pairs], dtype=float)
    if (gains < 0).any() or not np.isfinite(gains).all():
        raise PreconditionError("gains must be finite and >= 0")
    if (probs <= 0).any() or abs(float(probs.sum()) - 1.0) > 1e-6:
        raise PreconditionError(
            f"probabilities must be positive and sum to 1, got sum {probs.sum():g}"
        )
    probs = probs / probs.sum()
    if not (budget > 0):
        raise PreconditionError(f"budget must be > 0, got {budget!r}")
    if not (gains > 0).any():
        raise PreconditionError("all gains are zero")
    powers, nu = _waterfill_powers(gains, probs, budget)
    rate = float(probs @ np.log2(1.0 + gains * powers))
    policy = PowerPolicy(p1=tuple(powers), p2=(0.0,) * len(pairs))
    return WaterfillResult(policy=policy, water_level=nu, achieved_rate=rate)


class RateObjective:
    """Fading-averaged weighted sum of log rate terms.

    f(P1, P2) = sum_r w_r E[log2(1 + a_r P1 + b_r P2)], where a_r and
    b_r are per-state nonnegative coefficient vectors (scalars
    broadcast).  Negative weights are allowed; whether the combination
    is concave is the caller's responsibility.
    """

    __slots__ = ("probs", "terms")

    def __init__(self, probs, terms: Sequence[tuple[float, object, object]]):
        self.probs = np.asarray(probs, dtype=float)
        n = self.probs.shape[0]
        built = []
        for w, a, b in terms:
            a_vec = np.broadcast_to(np.asarray(a, dtype=float), (n,)).copy()
            b_vec = np.broadcast_to(np.asarray(b, dtype=float), (n,)).copy()
            built.append((float(w), a_vec, b_vec))
        self.terms = built

    def value(self, p1: np.ndarray, p2: np.ndarray) -> float:
        acc = 0.0
        for w, a, b in self.terms:
            acc += w * float(self.probs @ np.log1p(a * p1 + b * p2))
        return acc / LN2

    def gradient(self, p1: np.ndarray, p2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g1 = np.zeros_like(self.probs)
        g2 = np.zeros_like(self.probs)
        for w, a, b in self.terms:
            den = 1.0 + a * p1 + b * p2
            g1 += w * self.probs * a / den
            g2 += w * self.probs * b / den
        return g1 / LN2, g2 / LN2


class PerStateMinRate:
    """Expectation of a per-state minimum over branch rates.

    Each branch is a list of (weight, a, b) log terms as in
    RateObjective, but the minimum is taken inside the expectation:
    f(P1, P2) = E[min_i sum_r w_ir log2(1 + a_ir P1 + b_ir P2)].  A
    supergradient follows the lowest-index minimizing branch per state.
    """

    __slots__ = ("probs", "branches")

    def __init__(self, probs, branches):
        self.probs = np.asarray(probs, dtype=float)
        n = self.probs.shape[0]
        built = []
        for branch in branches:
            rows = []
            for w, a, b in branch:
                a_vec = np.broadcast_to(np.asarray(a, dtype=float), (n,)).copy()
                b_vec = np.broadcast_to(np.asarray(b, dtype=float), (n,)).copy()
                rows.append((float(w), a_vec, b_vec))
            built.append(rows)
        self.branches = built

    def branch_values(self, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
        """Per-state branch rates in bits, shape (n_branches, n_states)."""
        out = np.zeros((len(self.branches), self.probs.shape[0]))
        for i, rows in enumerate(self.branches):
            for w, a, b in rows:
                out[i] += w * np.log1p(a * p1 + b * p2)
        return out / LN2

    def value(self, p1: np.ndarray, p2: np.ndarray) -> float:
        return float(self.probs @ self.branch_values(p1, p2).min(axis=0))

    def gradient(self, p1: np.ndarray, p2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        winner = self.branch_values(p1, p2).argmin(axis=0)
        g1 = np.zeros_like(self.probs)
        g2 = np.zeros_like(self.probs)
        for i, rows in enumerate(self.branches):
            mask = winner == i
            if not mask.any():
                continue
            for w, a, b in rows:
                den = 1.0 + a[mask] * p1[mask] + b[mask] * p2[mask]
                g1[mask] += w * self.probs[mask] * a[mask] / den
                g2[mask] += w * self.probs[mask] * b[mask] / den
        return g1 / LN2, g2 / LN2


def _project_capped(y: np.ndarray, p: np.ndarray, cap: float) -> np.ndarray:
    """Project y onto {x >= 0, p.x <= cap} in the p-weighted metric.

    The projection is a constant downward shift followed by clipping:
    x = (y - theta)+ with theta chosen so the budget binds whenever the
    clipped point overspends.  theta is found exactly by sorting.
    """
    x = np.maximum(y, 0.0)
    if cap <= 0.0:
        return np.zeros_like(x)
    if float(p @ x) <= cap:
        return x
    order = np.argsort(y)[::-1]
    ys = y[order]
    ps = p[order]
    cw = np.cumsum(ps)
    cv = np.cumsum(ps * ys)
    t_cand = (cv - cap) / cw
    # <= keeps the support nonempty when rounding absorbs a tiny cap;
    # equality at k gives the same theta as k-1, so the shift is unchanged
    ok = np.nonzero(t_cand <= ys)[0]
    theta = t_cand[ok.max()]
    return np.maximum(y - theta, 0.0)


def kkt_residual(process: FadingProcess, policy: PowerPolicy, objective, budget: PowerBudget) -> float:
    """Stationarity and complementary-slackness violation of a policy.

    The residual is the max over both users of: |grad/p - lambda| on
    active coordinates, (grad/p - lambda)+ on inactive ones, budget
    overshoot, negativity, and lambda times any budget slack.  lambda
    is the probability-weighted least-squares multiplier over the
    active set (clamped nonnegative), or zero when the budget is slack.
    """
    p = process.prob_array
    p1, p2 = policy.arrays
    grad1, grad2 = objective.gradient(p1, p2)
    worst = 0.0
    for powers, grad, cap in ((p1, grad1, budget.p1_bar), (p2, grad2, budget.p2_bar)):
        G = grad / p
        spend = float(p @ powers)
        slack = cap - spend
        active = powers > ACTIVE_TOL
        if slack > 1e-9:
            lam = 0.0
        elif active.any():
            lam = max(0.0, float(p[active] @ G[active]) / float(p[active].sum()))
        else:
            lam = max(0.0, float(G.max()))
        if active.any():
            worst = max(worst, float(np.abs(G[active] - lam).max()))
        if (~active).any():
            worst = max(worst, float(np.maximum(G[~active] - lam, 0.0).max()))
        worst = max(worst, spend - cap, float(-powers.min()) if powers.size else 0.0)
        worst = max(worst, lam * max(slack, 0.0))
    return float(max(worst, 0.0))


def kkt_residual_bundle(
    process: FadingProcess, policy: PowerPolicy, objectives, budget: PowerBudget
) -> float:
    """KKT residual for max-min over several objectives.

    Objectives within 1e-6 (relative) of the minimum form the active
    bundle; stationarity must hold for some convex combination of their
    gradients.  The best combination is found by a small linear
    program minimizing the worst coordinate violation.
    """
    p = process.prob_array
    p1, p2 = policy.arrays
    vals = [obj.value(p1, p2) for obj in objectives]
    m = min(vals)
    bundle = [o for o, v in zip(objectives, vals) if v <= m + 1e-6 * (1.0 + abs(m))]
    if len(bundle) == 1:
        return kkt_residual(process, policy, bundle[0], budget)

    grads = [obj.gradient(p1, p2) for obj in bundle]
    k = len(bundle)
    n = p.shape[0]
    rows_ub = []
    rhs_ub = []
    extra = 0.0
    # Variables: theta_1..theta_k, lam1, lam2, t.
    for u, (powers, cap) in enumerate(((p1, budget.p1_bar), (p2, budget.p2_bar))):
        G = np.stack([g[u] / p for g in grads], axis=0)
        spend = float(p @ powers)
        lam_col = k + u
        slack_budget = cap - spend > 1e-9
        active = powers > ACTIVE_TOL
        for h in range(n):
            row = np.zeros(k + 3)
            row[:k] = G[:, h]
            row[lam_col] = -1.0
            row[-1] = -1.0
            rows_ub.append(row.copy())
            rhs_ub.append(0.0)
            if active[h]:
                neg = -row
                neg[-1] = -1.0
                rows_ub.append(neg)
                rhs_ub.append(0.0)
        if slack_budget:
            # lam forced to zero below via its bound.
            pass
        extra = max(extra, spend - cap, float(-powers.min()) if powers.size else 0.0)
    bounds = [(0.0, 1.0)] * k
    for u, (powers, cap) in enumerate(((p1, budget.p1_bar), (p2, budget.p2_bar))):
        spend = float(p @ powers)
        if cap - spend > 1e-9:
            bounds.append((0.0, 0.0))
        else:
            bounds.append((0.0, None))
    bounds.append((0.0, None))
    c = np.zeros(k + 3)
    c[-1] = 1.0
    a_eq = np.zeros((1, k + 3))
    a_eq[0, :k] = 1.0
    res = sciopt.linprog(
        c,
        A_ub=np.array(rows_ub),
        b_ub=np.array(rhs_ub),
        A_eq=a_eq,
        b_eq=np.array([1.0]),
        bounds=bounds,
        method="highs",
    )
    if res.status == 0:
        return float(max(res.fun, extra, 0.0))
    return float(max(min(kkt_residual(process, policy, o, budget) for o in bundle), extra))


def _epigraph_polish(p, objectives, b1, b2, x1, x2, maxiter=300):
    """SLSQP on the epigraph form: maximize t s.t. every objective >= t.

    Variables are (P1, P2, t).  Returns (P1, P2) repaired to strict
    feasibility, or None when the solver makes no usable progress.
    """
    n = p.shape[0]
    t0 = min(o.value(x1, x2) for o in objectives)
    z0 = np.concatenate([x1, x2, [t0]])

    def split(z):
        return z[:n], z[n : 2 * n], z[-1]

    cons = []
    for obj in objectives:

        def val(z, obj=obj):
            q1, q2, t = split(z)
            return obj.value(q1, q2) - t

        def jac(z, obj=obj):
            q1, q2, _ = split(z)
            g1, g2 = obj.gradient(q1, q2)
            return np.concatenate([g1, g2, [-1.0]])

        cons.append({"type": "ineq", "fun": val, "jac": jac})
    for col, cap in ((0, b1), (1, b2)):

        def val(z, col=col, cap=cap):
            q = split(z)[col]
            return cap - float(p @ q)

        def jac(z, col=col):
            row = np.zeros(2 * n + 1)
            row[col * n : (col + 1) * n] = -p
            return row

        cons.append({"type": "ineq", "fun": val, "jac": jac})
    bounds = [(0.0, None)] * (2 * n) + [(None, None)]
    try:
        res = sciopt.minimize(
            lambda z: -z[-1],
            z0,
            jac=lambda z: np.concatenate([np.zeros(2 * n), [-1.0]]),
            bounds=bounds,
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-12, "maxiter": maxiter},
        )
    except (ValueError, OverflowError):
        return None
    q1, q2, _ = split(res.x)
    q1 = np.maximum(q1, 0.0)
    q2 = np.maximum(q2, 0.0)
    for q, cap in ((q1, b1), (q2, b2)):
        spend = float(p @ q)
        if spend > cap > 0:
            q *= cap / spend
        elif spend > cap:
            q[:] = 0.0
    return q1, q2


def maximize_min_concave(
    process: FadingProcess,
    objectives,
    budget: PowerBudget,
    tol: float = 1e-6,
    *,
    max_iters: int = 50000,
    polish: bool = True,
    target_value: float | None = None,
    extra_starts: Sequence[PowerPolicy] = (),
) -> OptimizerReport:
    """Maximize min_i f_i(P) over feasible policies, f_i concave.

    Projected supergradient ascent in the probability-weighted metric
    with step c/sqrt(t), doubling-window iterate averaging, and
    best-candidate tracking, followed by an epigraph SLSQP polish.
    ``target_value`` stops the search early once the best value is
    within 6e-4 of the target (used by callers that only need to know
    whether the optimum exceeds a threshold).  Concavity of each
    objective is the caller's responsibility.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    objs = list(objectives)
    if not objs:
        raise ValueError("objectives must be non-empty")
    p = process.prob_array
    n = process.n_states
    b1, b2 = budget.p1_bar, budget.p2_bar

    def min_value(x1, x2):
        return min(o.value(x1, x2) for o in objs)

    starts: list[tuple[np.ndarray, np.ndarray]] = [(np.full(n, b1), np.full(n, b2))]
    for pol in extra_starts:
        a1, a2 = pol.arrays
        starts.append((a1.copy(), a2.copy()))

    best_val = -math.inf
    best: tuple[np.ndarray, np.ndarray] | None = None
    iterations = 0
    step_scale = max(b1, b2, 1e-3)
    per_start = max(max_iters // len(starts), 1)
    reached_target = False

    for s1, s2 in starts:
        x1 = _project_capped(np.asarray(s1, dtype=float), p, b1)
        x2 = _project_capped(np.asarray(s2, dtype=float), p, b2)
        avg1, avg2 = x1.copy(), x2.copy()
        window_start = 1
        next_check = 16
        for t in range(1, per_start + 1):
            iterations += 1
            vals = [o.value(x1, x2) for o in objs]
            i_min = int(np.argmin(vals))
            val = vals[i_min]
            if val > best_val:
                best_val = val
                best = (x1.copy(), x2.copy())
            if target_value is not None and best_val >= target_value - 6e-4:
                reached_target = True
                break
            g1, g2 = objs[i_min].gradient(x1, x2)
            eta = step_scale / math.sqrt(t)
            x1 = _project_capped(x1 + eta * g1 / p, p, b1)
            x2 = _project_capped(x2 + eta * g2 / p, p, b2)
            span = t - window_start + 1
            avg1 += (x1 - avg1) / span
            avg2 += (x2 - avg2) / span
            if t == next_check:
                v = min_value(avg1, avg2)
                if v > best_val:
                    best_val = v
                    best = (avg1.copy(), avg2.copy())
                    if target_value is not None and best_val >= target_value - 6e-4:
                        reached_target = True
                        break
                if t >= 4 * window_start:
                    window_start = t
                    avg1, avg2 = x1.copy(), x2.copy()
                next_check *= 2
        if reached_target:
            break

    assert best is not None
    if polish and n <= 400 and not reached_target:
        out = _epigraph_polish(p, objs, b1, b2, best[0], best[1])
        if out is not None:
            v = min_value(out[0], out[1])
            if v > best_val:
                best_val = v
                best = out
    policy = PowerPolicy.from_arrays(best[0], best[1])
    residual = kkt_residual_bundle(process, policy, objs, budget)
    return OptimizerReport(
        policy=policy,
        value=best_val,
        iterations=iterations,
        kkt_residual=residual,
        converged=bool(residual <= tol),
    )


def _mac_winner_powers(ga, gb, m1, m2):
    """Winner-take-all powers at dual multipliers (m1, m2).

    Per state the user with the larger g/mu transmits at the received
    water level (g/mu - 1)+; the other stays silent.  Ties go to user 1
    here and are repaired by the caller.
    """
    s1 = np.where(ga > 0, ga / m1, 0.0)
    s2 = np.where(gb > 0, gb / m2, 0.0)
    one_wins = s1 >= s2
    level = np.maximum(np.where(one_wins, s1, s2) - 1.0, 0.0)
    p1 = np.where(one_wins & (ga > 0), level / np.where(ga > 0, ga, 1.0), 0.0)
    p2 = np.where(~one_wins & (gb > 0), level / np.where(gb > 0, gb, 1.0), 0.0)
    return p1, p2


def mac_opportunistic_waterfill(
    process: FadingProcess, receiver: int, budget: PowerBudget, tol: float = 1e-6
) -> OptimizerReport:
    """Maximize the ergodic sum rate at one receiver of a two-user MAC.

    Solves max E[log2(1 + g_1 P1 + g_2 P2)] s.t. E[P_k] <= budget_k by
    bisecting the two dual multipliers (winner-take-all opportunistic
    scheduling), splitting power across near-tied states to meet user
    1's budget, then polishing with block-coordinate waterfilling until
    the policy is stationary.  The polish preserves feasibility and
    increases the objective monotonically.
    """
    if receiver not in (1, 2):
        raise ValueError(f"receiver must be 1 or 2, got {receiver!r}")
    g11, g12, g21, g22 = process.gain_arrays
    ga, gb = (g11, g12) if receiver == 1 else (g21, g22)
    p = process.prob_array
    n = process.n_states
    if not (ga > 0).any() and not (gb > 0).any():
        raise PreconditionError(
            f"receiver {receiver} sees zero gain from both transmitters in every state"
        )
    b1, b2 = budget.p1_bar, budget.p2_bar
    active1 = b1 > 0 and bool((ga > 0).any())
    active2 = b2 > 0 and bool((gb > 0).any())
    objective = RateObjective(p, [(1.0, ga, gb)])

    def report(p1, p2, iters):
        pol = PowerPolicy.from_arrays(p1, p2)
        val = objective.value(p1, p2)
        res = kkt_residual(process, pol, objective, budget)
        return OptimizerReport(pol, val, iters, res, bool(res <= tol))

    if not active1 and not active2:
        return report(np.zeros(n), np.zeros(n), 0)
    if active1 and not active2:
        powers, _ = _waterfill_powers(ga, p, b1)
        return report(powers, np.zeros(n), 120)
    if active2 and not active1:
        powers, _ = _waterfill_powers(gb, p, b2)
        return report(np.zeros(n), powers, 120)

    # Nested dual bisection in log-multiplier space; spending in each
    # user's multiplier is monotone, so sign-based bisection converges
    # even across winner flips.
    lo_log, hi_log = math.log(1e-12), math.log(1e12)
    evals = 0

    def solve_m1(m2):
        nonlocal evals
        lo, hi = lo_log, hi_log
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            p1_mid, _ = _mac_winner_powers(ga, gb, math.exp(mid), m2)
            evals += 1
            if float(p @ p1_mid) > b1:
                lo = mid
            else:
                hi = mid
        return math.exp(0.5 * (lo + hi))

    lo, hi = lo_log, hi_log
    spend_lo = None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        m2 = math.exp(mid)
        m1 = solve_m1(m2)
        _, p2_mid = _mac_winner_powers(ga, gb, m1, m2)
        if float(p @ p2_mid) > b2:
            lo = mid
        else:
            hi = mid
    m2 = math.exp(0.5 * (lo + hi))
    m1 = solve_m1(m2)
    p1_cur, p2_cur = _mac_winner_powers(ga, gb, m1, m2)

    # Repair near-ties: split the received water level so user 1's
    # average power meets its budget exactly (linear in the fraction).
    s1 = np.where(ga > 0, ga / m1, 0.0)
    s2 = np.where(gb > 0, gb / m2, 0.0)
    scale = np.maximum(s1, s2)
    tie = (scale > 1.0) & (np.abs(s1 - s2) <= 1e-7 * scale) & (ga > 0) & (gb > 0)
    if tie.any():
        level = np.maximum(scale - 1.0, 0.0)
        fixed = float(p[~tie] @ p1_cur[~tie])
        tie_spend = float(p[tie] @ (level[tie] / ga[tie]))
        frac = min(max((b1 - fixed) / tie_spend, 0.0), 1.0) if tie_spend > 0 else 0.0
        p1_cur = p1_cur.copy()
        p2_cur = p2_cur.copy()
        p1_cur[tie] = frac * level[tie] / ga[tie]
        p2_cur[tie] = (1.0 - frac) * level[tie] / gb[tie]

    # Block-coordinate polish: each user waterfills on its gain scaled
    # down by the other's received power.  Each half-step is an exact
    # block maximum, so the objective ascends and budgets bind exactly.
    rounds = 0
    for rounds in range(1, 401):
        eff1 = np.where(ga > 0, ga / (1.0 + gb * p2_cur), 0.0)
        new1, _ = _waterfill_powers(eff1, p, b1)
        eff2 = np.where(gb > 0, gb / (1.0 + ga * new1), 0.0)
        new2, _ = _waterfill_powers(eff2, p, b2)
        delta = max(
            float(np.abs(new1 - p1_cur).max()), float(np.abs(new2 - p2_cur).max())
        )
        p1_cur, p2_cur = new1, new2
        if delta <= 1e-13 * (1.0 + max(float(p1_cur.max()), float(p2_cur.max()))):
            break
    return report(p1_cur, p2_cur, evals + rounds)
