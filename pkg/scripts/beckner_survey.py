"""Beckner ratio of the conformal trial against random positive trials, both exponent conventions."""

import argparse

from qcurv.functionals import beckner_ratio, beckner_trial
from qcurv.harmonic import random_ensemble

CASES = [(4, -0.5), (4, -1.0), (6, -1.0), (6, -2.0), (2, -0.5)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    for conv in ("mobius", "printed"):
        print(f"exponent convention: {conv}")
        for n, nu in CASES:
            trial = [beckner_ratio(t, t, nu, convention=conv)
                     for t in (beckner_trial(n, nu, a) for a in (0.0, 0.4, 0.8))]
            rivals = [beckner_ratio(w.exp(), w.exp(), nu, convention=conv)
                      for w in random_ensemble(n, args.count, seed=args.seed)]
            print(f"  n={n} nu={nu:+.1f}  trial(alpha=0,0.4,0.8) = "
                  + ", ".join(f"{v:.6f}" for v in trial) + f"  best random = {max(rivals):.6f}")


if __name__ == "__main__":
    main()
