"""Count violations of the face-value and rate bounds on a wide random box.

The interval ``dB/dD < exp(-(r - lambda k) tau)`` can fail when the mean jump
``k`` is negative.  The sharp upper end is ``exp(-r tau)``: the Poisson sum of
``w_n exp(-n gamma)`` equals ``exp(-lambda k tau)``, so the shared series is
below ``exp(-r tau)`` for any sign of ``k``.  This script tallies both.
"""

import argparse
import math
import random

from jumpcredit import JumpParams, MarketScenario, TruncationPolicy, full_report
from jumpcredit.sensitivities import discount_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    t = TruncationPolicy.adaptive(1e-13)
    stated = sharp = neg_k = 0
    worst = None
    for _ in range(args.points):
        s = MarketScenario(rng.uniform(20, 200), rng.uniform(20, 200), rng.uniform(0.1, 5),
                           rng.uniform(0.05, 0.6), rng.uniform(0.0, 0.1))
        j = JumpParams(rng.uniform(0.0, 1.0), rng.uniform(-1.0, 0.5), rng.uniform(0.01, 1.0))
        rep = full_report(s, j, t)
        neg_k += j.k < 0
        if not 0 < rep.dB_dD < discount_bound(s, j):
            stated += 1
            ratio = rep.dB_dD / discount_bound(s, j)
            if worst is None or ratio > worst[0]:
                worst = (ratio, s, j)
        if not 0 < rep.dB_dD < math.exp(-s.r * s.tau):
            sharp += 1
    print(f"points {args.points}, with k < 0: {neg_k}")
    print(f"dB_dD outside (0, exp(-(r - lambda k) tau)): {stated}")
    print(f"dB_dD outside (0, exp(-r tau)):              {sharp}")
    if worst:
        ratio, s, j = worst
        print(f"largest dB_dD / exp(-(r - lambda k) tau) = {ratio:.6f} at {s} {j} (k = {j.k:.4f})")


if __name__ == "__main__":
    main()
