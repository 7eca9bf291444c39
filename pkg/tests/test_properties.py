"""Randomized structural invariants over the cheap, closed-form operations."""

import numpy as np
from hypothesis import given, settings, strategies as st

from fading_ifc.channel import (
    FadingState,
    PowerBudget,
    PowerPolicy,
    channel_from_dict,
    channel_to_dict,
)
from fading_ifc.allocate import _project_capped, waterfill
from fading_ifc.classify import StateLabel, classify_state
from fading_ifc.cmac import sum_rate_fixed_policy
from fading_ifc.ifc import HkAllocation, hk_sum_rates, tdm_baseline

from oracles import channel

finite_gain = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)
pos_gain = st.floats(min_value=1e-3, max_value=50.0, allow_nan=False)
power = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


@st.composite
def gain_tuples(draw, n_min=1, n_max=3, positive=False):
    n = draw(st.integers(n_min, n_max))
    g = pos_gain if positive else finite_gain
    return [tuple(draw(g) for _ in range(4)) for _ in range(n)]


@settings(max_examples=50, deadline=None)
@given(g=st.tuples(finite_gain, finite_gain, finite_gain, finite_gain))
def test_every_state_gets_exactly_one_label(g):
    label = classify_state(FadingState(*g))
    assert label in StateLabel


@settings(max_examples=50, deadline=None)
@given(g=st.tuples(pos_gain, pos_gain, pos_gain, pos_gain))
def test_state_label_survives_user_swap(g):
    state = FadingState(*g)
    mirrored = FadingState(g11=state.g22, g12=state.g21, g21=state.g12, g22=state.g11)
    # with all gains positive the label compares the same gain pairs either way
    assert classify_state(state) is classify_state(mirrored)


@settings(max_examples=40, deadline=None)
@given(
    gains=st.lists(pos_gain, min_size=1, max_size=6),
    budget=st.floats(min_value=0.01, max_value=20.0),
)
def test_waterfill_spends_the_whole_budget(gains, budget):
    probs = [1.0 / len(gains)] * len(gains)
    res = waterfill(list(zip(gains, probs)), budget)
    assert (res.powers >= 0).all()
    spend = float(np.dot(probs, res.powers))
    assert abs(spend - budget) <= 1e-7 * max(budget, 1.0)
    for g, q in zip(gains, res.powers):
        if q > 1e-9:
            assert 1.0 / g + q <= res.water_level + 1e-6


@settings(max_examples=40, deadline=None)
@given(
    y=st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=6),
    cap=st.floats(min_value=0.0, max_value=5.0),
)
def test_projection_returns_feasible_point(y, cap):
    y = np.asarray(y, dtype=float)
    p = np.full(y.size, 1.0 / y.size)
    x = _project_capped(y, p, cap)
    assert (x >= -1e-12).all()
    assert float(p @ x) <= cap + 1e-9


@settings(max_examples=25, deadline=None)
@given(states=gain_tuples(positive=True), data=st.data())
def test_fixed_policy_sum_rate_is_user_symmetric(states, data):
    proc = channel(states)
    n = proc.n_states
    p1 = [data.draw(power) for _ in range(n)]
    p2 = [data.draw(power) for _ in range(n)]
    pol = PowerPolicy(p1=tuple(p1), p2=tuple(p2))
    swapped = PowerPolicy(p1=tuple(p2), p2=tuple(p1))
    a = sum_rate_fixed_policy(proc, pol)
    b = sum_rate_fixed_policy(proc.swap_users(), swapped)
    assert abs(a - b) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(states=gain_tuples(positive=True), data=st.data())
def test_full_private_split_collapses_the_sum_rates(states, data):
    one_sided = [(g11, g12, 0.0, g22) for g11, g12, _, g22 in states]
    proc = channel(one_sided)
    n = proc.n_states
    pol = PowerPolicy(
        p1=tuple(data.draw(power) for _ in range(n)),
        p2=tuple(data.draw(power) for _ in range(n)),
    )
    s1, s2 = hk_sum_rates(proc, HkAllocation(pol, (1.0,) * n))
    assert s1 == s2


@settings(max_examples=25, deadline=None)
@given(states=gain_tuples(positive=True), b1=power, b2=power)
def test_time_duplexing_is_nonnegative_and_monotone(states, b1, b2):
    proc = channel(states)
    lo = tdm_baseline(proc, PowerBudget(b1, b2))
    hi = tdm_baseline(proc, PowerBudget(b1 + 1.0, b2 + 1.0))
    assert 0.0 <= lo <= hi + 1e-12


@settings(max_examples=25, deadline=None)
@given(states=gain_tuples(positive=True), b1=power, b2=power)
def test_channel_document_round_trip(states, b1, b2):
    proc = channel(states)
    budget = PowerBudget(b1, b2)
    doc = channel_to_dict(proc, budget)
    proc2, budget2 = channel_from_dict(doc)
    assert proc2.states == proc.states
    np.testing.assert_allclose(proc2.probs, proc.probs, atol=1e-12)
    assert budget2 == budget
