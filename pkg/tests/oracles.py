"""Independent reference implementations used to cross-check the optimizers.

Everything here is deliberately dumb: dense grids and central finite
differences, no reuse of the library's search code beyond pure rate
evaluation.  Agreement between these oracles and the fast paths is the
evidence the fast paths are right.
"""

import numpy as np

from fading_ifc.channel import (
    FadingProcess,
    PowerBudget,
    PowerPolicy,
    make_discrete_channel,
)

LN2 = float(np.log(2.0))


def channel(states, probs=None) -> FadingProcess:
    """Build a process from (g11, g12, g21, g22) tuples, equiprobable by default."""
    states = list(states)
    if probs is None:
        probs = [1.0 / len(states)] * len(states)
    return make_discrete_channel(zip(states, probs))


def _face_axis(b: float, step: float, center=None, halfwidth=None) -> np.ndarray:
    """Grid of first-state powers x_a with (x_a + x_b)/2 = b, x_a, x_b >= 0.

    Optionally restricted to a window around a previous incumbent.
    """
    lo, hi = 0.0, 2.0 * b
    if center is not None:
        lo = max(lo, center - halfwidth)
        hi = min(hi, center + halfwidth)
    axis = np.arange(lo, hi + 0.5 * step, step)
    return np.minimum(axis, hi)


def brute_face_sum_capacity(process: FadingProcess, budget: PowerBudget, step: float = 0.01) -> float:
    """Exhaustive fixed-policy sum rate over a per-state power grid.

    Every rate cap E[log2(1 + a P1 + b P2)] is nondecreasing in each
    power coordinate, so the max of their min is attained where both
    users spend their full average budget; each face power then stays
    within twice the budget automatically.  On that face each cap is
    concave in the two free coordinates, hence so is their min, so the
    coarse argmax brackets the true peak and two shrinking window
    passes (step/10, step/100) remove the discretization error.
    """
    g11, g12, g21, g22 = process.gain_arrays
    p = process.prob_array
    n = process.n_states
    if n == 1:
        X1 = np.array([[budget.p1_bar]])
        X2 = np.array([[budget.p2_bar]])
        return _face_best(p, (g11, g12, g21, g22), X1, X2)[0]
    if n != 2 or not np.allclose(p, 0.5):
        raise NotImplementedError("oracle handles 1-state or 2-state equiprobable only")

    c1 = c2 = None
    best = -np.inf
    for k in range(3):
        s = step / 10.0**k
        w = None if k == 0 else 1.5 * (step / 10.0 ** (k - 1))
        a1 = _face_axis(budget.p1_bar, s, c1, w)
        a2 = _face_axis(budget.p2_bar, s, c2, w)
        X1 = np.column_stack([a1, 2.0 * budget.p1_bar - a1])
        X2 = np.column_stack([a2, 2.0 * budget.p2_bar - a2])
        value, i, j = _face_best(p, (g11, g12, g21, g22), X1, X2)
        best = max(best, value)
        c1, c2 = float(a1[i]), float(a2[j])
    return best


def _face_best(p, gains, X1, X2):
    """Max of the fixed-policy sum rate over the cartesian power grid."""
    g11, g12, g21, g22 = gains
    n = p.shape[0]

    def pooled(ga, gb):
        acc = 0.0
        for h in range(n):
            acc = acc + p[h] * np.log1p(ga[h] * X1[:, h, None] + gb[h] * X2[None, :, h])
        return acc / LN2

    def solo(gv, X):
        acc = 0.0
        for h in range(n):
            acc = acc + p[h] * np.log1p(gv[h] * X[:, h])
        return acc / LN2

    r1 = np.minimum(solo(g11, X1), solo(g21, X1))
    r2 = np.minimum(solo(g12, X2), solo(g22, X2))
    value = np.minimum(np.minimum(pooled(g11, g12), pooled(g21, g22)), r1[:, None] + r2[None, :])
    flat = int(value.argmax())
    i, j = np.unravel_index(flat, value.shape)
    return float(value[i, j]), int(i), int(j)


def central_diff_gradient(fn, x1: np.ndarray, x2: np.ndarray, h: float = 1e-6):
    """Central finite differences of fn(x1, x2) in every power coordinate."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    g1 = np.zeros_like(x1)
    g2 = np.zeros_like(x2)
    for i in range(x1.size):
        e = np.zeros_like(x1)
        e[i] = h
        g1[i] = (fn(x1 + e, x2) - fn(x1 - e, x2)) / (2.0 * h)
        g2[i] = (fn(x1, x2 + e) - fn(x1, x2 - e)) / (2.0 * h)
    return g1, g2


def random_feasible_policy(rng: np.random.Generator, process: FadingProcess, budget: PowerBudget) -> PowerPolicy:
    """Draw a nonnegative policy whose average powers respect the budget."""
    p = process.prob_array
    cols = []
    for cap in (budget.p1_bar, budget.p2_bar):
        shape = rng.uniform(0.0, 1.0, size=process.n_states)
        spend = float(p @ shape)
        scale = rng.uniform(0.0, 1.0) * cap / spend if spend > 0 else 0.0
        cols.append(shape * scale)
    return PowerPolicy.from_arrays(cols[0], cols[1])


def random_two_state_channel(rng: np.random.Generator):
    """Criterion-style random instance: gains U[0.1, 5], budgets U[0.5, 2]."""
    gains = rng.uniform(0.1, 5.0, size=(2, 4))
    budget = PowerBudget(*rng.uniform(0.5, 2.0, size=2))
    return channel([tuple(row) for row in gains]), budget
