"""Tour of the channel sub-classes and their sum-rate operations.

Builds one small fading channel per sub-class, classifies it, and computes
the matching sum capacity (or bound) next to the interference-free outer
bound and the time-duplexing baseline.

Run:  python3 demos/subclass_tour.py
"""

from fading_ifc import (
    PowerBudget,
    classify_channel,
    evs_sum_capacity,
    hk_optimize,
    interference_free_outer_bound,
    make_discrete_channel,
    tdm_baseline,
    um_sum_capacity,
    us_sum_capacity,
    uw1_sum_capacity,
    uw2_upper_bound,
)


def build(states, probs=None):
    if probs is None:
        probs = [1.0 / len(states)] * len(states)
    return make_discrete_channel(zip(states, probs))


def main():
    budget = PowerBudget(1.0, 1.0)
    rows = [
        ("very strong", build([(1, 4, 4, 1)]), lambda p: evs_sum_capacity(p, budget)[0]),
        ("uniformly strong", build([(1, 1.1025, 1.1025, 1)]), lambda p: us_sum_capacity(p, budget)[0]),
        ("one-sided weak", build([(1, 0.25, 0, 1), (2, 0.5, 0, 1.5)]), lambda p: uw1_sum_capacity(p, budget)[0]),
        ("uniformly mixed", build([(1, 4, 0.25, 1)]), lambda p: um_sum_capacity(p, budget)[0]),
        ("two-sided weak (upper bound)", build([(1, 0.25, 0.25, 1)]), lambda p: uw2_upper_bound(p, budget)),
        ("one-sided hybrid (rate splitting)", build([(1, 4, 0, 1), (1, 0.25, 0, 1)]), lambda p: hk_optimize(p, budget)[0]),
    ]

    print(f"{'channel':<34} {'subclass':<16} {'value':>8} {'outer':>8} {'tdm':>8}")
    for name, proc, solve in rows:
        report = classify_channel(proc, budget)
        value = solve(proc)
        outer = interference_free_outer_bound(proc, budget)
        tdm = tdm_baseline(proc, budget)
        print(f"{name:<34} {report.subclass.value:<16} {value:8.4f} {outer:8.4f} {tdm:8.4f}")


if __name__ == "__main__":
    main()
