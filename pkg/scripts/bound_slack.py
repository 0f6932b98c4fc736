"""How much room the regret guarantees leave on seeded runs.

For each seed, reports the largest ratio of measured to guaranteed regret:
covered-interval sums, window regret, and the potential.

    python3 scripts/bound_slack.py --arms 10 --T 2048 --seeds 5
"""

import argparse
import math

import numpy as np

from saol import SAOL, MultiplicativeWeights, mw_bound, run
from saol.evaluation import (
    AdversarialExperts,
    SwitchingExperts,
    generate_environment,
    lemma2_bound,
    tau_grid,
    theorem1_window_bounds,
    window_regrets,
)


def slack(trace, n):
    T = trace.horizon
    covered = max(total / lemma2_bound(iv) for iv, total in trace.covered_regret.items() if iv.s <= T)
    spec = mw_bound(n)
    window = max(float((window_regrets(trace, tau) / theorem1_window_bounds(spec, tau, T)).max())
                 for tau in tau_grid(T))
    # the potential meets its cap exactly at t = 1, so start from t = 2
    t = np.arange(2, T + 1)
    pot = np.array([rec.potential for rec in trace.records[1:]])
    potential = float((pot / (t * (np.log2(t) + 1))).max())
    return covered, window, potential


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--arms", type=int, default=10)
    ap.add_argument("--T", type=int, default=2048)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--env", choices=("adversarial", "switching"), default="switching")
    args = ap.parse_args()

    print(f"{'seed':>4} {'covered':>9} {'window':>9} {'potential':>9}")
    for seed in range(args.seeds):
        if args.env == "adversarial":
            env = AdversarialExperts(args.arms, args.T, seed)
        else:
            env = SwitchingExperts.evenly(args.arms, args.T, max(1, int(math.log2(args.T)) // 2),
                                          noise=0.3, seed=seed)
        trace = run(SAOL(lambda h: MultiplicativeWeights(args.arms)), generate_environment(env))
        c, w, p = slack(trace, args.arms)
        print(f"{seed:>4d} {c:>9.4f} {w:>9.4f} {p:>9.4f}")


if __name__ == "__main__":
    main()
