"""How much joint coding across fading states buys over per-state codes.

Sweeps the mixing probability of a two-state strong-interference channel
whose states are mirror images of each other.  Coding jointly across the
states pools their diversity and reaches the interference-free corner;
coding each state separately pays the full strong-interference penalty.
The gap closes at the degenerate mixes where only one state survives.

Run:  python3 demos/separability_gap.py
"""

from fading_ifc import PowerBudget, make_discrete_channel, us_separable_sum_rate, us_sum_capacity

STATE_A = (1.0, 1.1025, 6.25, 1.0)
STATE_B = (1.0, 6.25, 1.1025, 1.0)


def mixture(p1: float):
    if p1 <= 0.0:
        return make_discrete_channel([(STATE_B, 1.0)])
    if p1 >= 1.0:
        return make_discrete_channel([(STATE_A, 1.0)])
    return make_discrete_channel([(STATE_A, p1), (STATE_B, 1.0 - p1)])


def main():
    budget = PowerBudget(1.0, 1.0)
    print(f"{'p1':>4} {'joint':>8} {'separable':>10} {'gap':>8}")
    for p1 in (0.0, 0.25, 0.5, 0.75, 1.0):
        proc = mixture(p1)
        joint, _ = us_sum_capacity(proc, budget)
        separable, _ = us_separable_sum_rate(proc, budget)
        print(f"{p1:4.2f} {joint:8.4f} {separable:10.4f} {joint - separable:8.4f}")


if __name__ == "__main__":
    main()
