"""Power allocation primitives: waterfilling, objectives, KKT audits, max-min solver."""

import numpy as np
import pytest

from fading_ifc.channel import PowerBudget, PowerPolicy, PreconditionError
from fading_ifc.allocate import (
    PerStateMinRate,
    RateObjective,
    _project_capped,
    kkt_residual,
    kkt_residual_bundle,
    mac_opportunistic_waterfill,
    maximize_min_concave,
    waterfill,
)

from oracles import central_diff_gradient, channel, random_feasible_policy

B11 = PowerBudget(1.0, 1.0)


class TestWaterfill:
    def test_two_level_closed_form(self):
        res = waterfill([(1.0, 0.5), (4.0, 0.5)], 1.0)
        assert res.water_level == pytest.approx(1.625, abs=1e-9)
        np.testing.assert_allclose(res.powers, [0.625, 1.375], atol=1e-9)
        assert res.achieved_rate == pytest.approx(1.70043971814109, abs=1e-9)

    def test_budget_met_exactly(self):
        res = waterfill([(0.3, 0.2), (1.0, 0.5), (7.0, 0.3)], 2.0)
        spend = 0.2 * res.powers[0] + 0.5 * res.powers[1] + 0.3 * res.powers[2]
        assert spend == pytest.approx(2.0, abs=1e-9)

    def test_weak_state_shut_off(self):
        res = waterfill([(1.0, 0.5), (4.0, 0.5)], 0.1)
        assert res.powers[0] == 0.0
        assert res.powers[1] == pytest.approx(0.2, abs=1e-9)
        assert res.water_level == pytest.approx(0.45, abs=1e-9)

    def test_active_states_share_the_water_level(self):
        gains = [0.8, 1.3, 2.1, 5.0]
        res = waterfill([(g, 0.25) for g in gains], 1.5)
        for g, p in zip(gains, res.powers):
            if p > 1e-9:
                assert 1.0 / g + p == pytest.approx(res.water_level, abs=1e-8)

    @pytest.mark.parametrize(
        "dist, budget, msg",
        [
            ([], 1.0, "non-empty"),
            ([(1.0, 0.6)], 1.0, "sum to 1"),
            ([(-1.0, 1.0)], 1.0, "finite"),
            ([(1.0, 1.0)], 0.0, "budget"),
            ([(0.0, 1.0)], 1.0, "zero"),
        ],
    )
    def test_input_validation(self, dist, budget, msg):
        with pytest.raises(PreconditionError, match=msg):
            waterfill(dist, budget)


class TestRateObjective:
    def test_value_matches_direct_formula(self):
        p = np.array([0.4, 0.6])
        obj = RateObjective(p, [(1.0, np.array([1.0, 2.0]), 0.5), (-1.0, 0.0, 0.5)])
        x1 = np.array([1.0, 2.0])
        x2 = np.array([0.5, 1.5])
        want = float(
            p @ np.log2(1 + np.array([1.0, 2.0]) * x1 + 0.5 * x2)
            - p @ np.log2(1 + 0.5 * x2)
        )
        assert obj.value(x1, x2) == pytest.approx(want, abs=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        p = rng.dirichlet(np.ones(3))
        obj = RateObjective(
            p,
            [
                (1.0, rng.uniform(0.1, 4, 3), rng.uniform(0.1, 4, 3)),
                (-1.0, np.zeros(3), rng.uniform(0.1, 4, 3)),
            ],
        )
        x1 = rng.uniform(0.2, 2, 3)
        x2 = rng.uniform(0.2, 2, 3)
        g1, g2 = obj.gradient(x1, x2)
        f1, f2 = central_diff_gradient(obj.value, x1, x2)
        np.testing.assert_allclose(g1, f1, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(g2, f2, rtol=1e-6, atol=1e-8)

    def test_scalar_coefficients_broadcast(self):
        obj = RateObjective(np.array([0.5, 0.5]), [(2.0, 1.0, 0.0)])
        assert obj.value(np.ones(2), np.zeros(2)) == pytest.approx(2.0)


class TestPerStateMinRate:
    def test_value_is_expected_min(self):
        p = np.array([0.5, 0.5])
        branches = [[(1.0, 1.0, 0.0)], [(1.0, 0.0, 1.0)]]
        obj = PerStateMinRate(p, branches)
        x1 = np.array([1.0, 3.0])
        x2 = np.array([3.0, 1.0])
        # per state the min of log2(1+x1) and log2(1+x2) is log2(2) = 1
        assert obj.value(x1, x2) == pytest.approx(1.0, abs=1e-12)
        bv = obj.branch_values(x1, x2)
        assert bv.shape == (2, 2)
        np.testing.assert_allclose(bv[0], np.log2(1 + x1))

    def test_gradient_follows_minimizing_branch(self):
        p = np.array([1.0])
        obj = PerStateMinRate(p, [[(1.0, 1.0, 0.0)], [(1.0, 0.0, 1.0)]])
        # branch 1 (user 2's rate) is strictly smaller here
        g1, g2 = obj.gradient(np.array([5.0]), np.array([1.0]))
        assert g1[0] == 0.0
        assert g2[0] == pytest.approx(1.0 / (2.0 * np.log(2.0)))

    def test_gradient_matches_fd_away_from_kinks(self):
        rng = np.random.default_rng(11)
        p = rng.dirichlet(np.ones(2))
        obj = PerStateMinRate(
            p,
            [
                [(1.0, rng.uniform(0.5, 2, 2), rng.uniform(0.5, 2, 2))],
                [(1.0, rng.uniform(0.5, 2, 2), 0.0), (1.0, 0.0, rng.uniform(0.5, 2, 2))],
            ],
        )
        x1 = np.array([0.7, 1.9])
        x2 = np.array([1.1, 0.4])
        gap = np.abs(np.diff(obj.branch_values(x1, x2), axis=0))
        assert gap.min() > 1e-4, "fixture accidentally sits on a kink"
        g1, g2 = obj.gradient(x1, x2)
        f1, f2 = central_diff_gradient(obj.value, x1, x2)
        np.testing.assert_allclose(g1, f1, rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(g2, f2, rtol=1e-5, atol=1e-8)


class TestProjectCapped:
    def test_projection_is_feasible_and_idempotent(self):
        rng = np.random.default_rng(0)
        p = rng.dirichlet(np.ones(5))
        y = rng.normal(0, 2, 5)
        x = _project_capped(y, p, 1.0)
        assert (x >= 0).all()
        assert float(p @ x) <= 1.0 + 1e-9
        np.testing.assert_allclose(_project_capped(x, p, 1.0), x, atol=1e-9)

    def test_interior_points_untouched(self):
        p = np.full(3, 1.0 / 3.0)
        y = np.array([0.1, 0.2, 0.3])
        np.testing.assert_allclose(_project_capped(y, p, 1.0), y, atol=1e-12)

    def test_zero_cap_silences(self):
        p = np.array([0.5, 0.5])
        np.testing.assert_allclose(_project_capped(np.array([3.0, 4.0]), p, 0.0), 0.0)


class TestKktResidual:
    def test_zero_at_waterfilling_optimum(self):
        proc = channel([(1, 0, 0, 1), (4, 0, 0, 1)])
        res = waterfill([(1.0, 0.5), (4.0, 0.5)], 1.0)
        obj = RateObjective(proc.prob_array, [(1.0, np.array([1.0, 4.0]), 0.0)])
        pol = PowerPolicy.from_arrays(res.powers, np.zeros(2))
        assert kkt_residual(proc, pol, obj, B11) <= 1e-8

    def test_positive_at_suboptimal_point(self):
        proc = channel([(1, 0, 0, 1), (4, 0, 0, 1)])
        obj = RateObjective(proc.prob_array, [(1.0, np.array([1.0, 4.0]), 0.0)])
        pol = PowerPolicy(p1=(1.0, 1.0), p2=(0.0, 0.0))
        assert kkt_residual(proc, pol, obj, B11) > 1e-3


class TestMaximizeMinConcave:
    def test_single_objective_reduces_to_waterfilling(self):
        proc = channel([(1, 0, 0, 1), (4, 0, 0, 1)])
        obj = RateObjective(proc.prob_array, [(1.0, np.array([1.0, 4.0]), 0.0)])
        rep = maximize_min_concave(proc, [obj], B11, 1e-6)
        assert rep.value == pytest.approx(1.70043971814109, abs=1e-6)
        assert rep.converged

    def test_minimax_balances_symmetric_objectives(self):
        proc = channel([(1, 0, 0, 1)])
        o1 = RateObjective(proc.prob_array, [(1.0, 1.0, 0.0)])
        o2 = RateObjective(proc.prob_array, [(1.0, 0.0, 1.0)])
        rep = maximize_min_concave(proc, [o1, o2], B11, 1e-6)
        # each objective ignores one user, so both hit log2(2) at full power
        assert rep.value == pytest.approx(1.0, abs=1e-6)

    def test_dominates_random_feasible_policies(self):
        rng = np.random.default_rng(5)
        proc = channel([(1, 0.3, 0.2, 2), (3, 1.0, 0.4, 1)])
        objs = [
            RateObjective(proc.prob_array, [(1.0, proc.gain_arrays[0], proc.gain_arrays[1])]),
            RateObjective(proc.prob_array, [(1.0, proc.gain_arrays[2], proc.gain_arrays[3])]),
        ]
        rep = maximize_min_concave(proc, objs, B11, 1e-6)
        for _ in range(200):
            pol = random_feasible_policy(rng, proc, B11)
            x1, x2 = pol.arrays
            assert min(o.value(x1, x2) for o in objs) <= rep.value + 1e-6

    def test_bundle_residual_small_at_optimum(self):
        proc = channel([(1, 0.3, 0.2, 2), (3, 1.0, 0.4, 1)])
        objs = [
            RateObjective(proc.prob_array, [(1.0, proc.gain_arrays[0], proc.gain_arrays[1])]),
            RateObjective(proc.prob_array, [(1.0, proc.gain_arrays[2], proc.gain_arrays[3])]),
        ]
        rep = maximize_min_concave(proc, objs, B11, 1e-6)
        assert kkt_residual_bundle(proc, rep.policy, objs, B11) <= 1e-4


class TestMacOpportunisticWaterfill:
    def test_opposed_fading_schedules_the_stronger_user(self):
        proc = channel([(4, 1, 0, 0), (1, 4, 0, 0)])
        rep = mac_opportunistic_waterfill(proc, 1, B11)
        assert rep.value == pytest.approx(np.log2(9.0), abs=1e-9)
        np.testing.assert_allclose(rep.policy.arrays[0], [2.0, 0.0], atol=1e-6)
        np.testing.assert_allclose(rep.policy.arrays[1], [0.0, 2.0], atol=1e-6)
        assert rep.kkt_residual <= 1e-6

    def test_budgets_respected(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            gains = rng.uniform(0.1, 5, (3, 4))
            proc = channel([tuple(r) for r in gains])
            budget = PowerBudget(*rng.uniform(0.3, 2.0, 2))
            rep = mac_opportunistic_waterfill(proc, 2, budget)
            p = proc.prob_array
            assert float(p @ rep.policy.arrays[0]) <= budget.p1_bar + 1e-7
            assert float(p @ rep.policy.arrays[1]) <= budget.p2_bar + 1e-7
            assert rep.kkt_residual <= 1e-5

    def test_receiver_argument_checked(self):
        with pytest.raises(ValueError, match="receiver"):
            mac_opportunistic_waterfill(channel([(1, 1, 1, 1)]), 3, B11)

    def test_all_zero_gains_rejected(self):
        with pytest.raises(PreconditionError, match="zero gain"):
            mac_opportunistic_waterfill(channel([(0, 0, 1, 1)]), 1, B11)
