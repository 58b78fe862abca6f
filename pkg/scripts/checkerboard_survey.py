"""Signs of the coupled determinant functionals over seeded random ensembles."""

import argparse

import numpy as np

from qcurv.functionals import COUPLINGS, det_quotient, volume_normalized
from qcurv.harmonic import random_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--amplitude", type=float, default=0.3)
    args = ap.parse_args()
    print(f"{'dim':>3s} {'operator':>8s} {'min':>12s} {'max':>12s}  sign")
    for (dim, tag), _ in sorted(COUPLINGS.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        ens = random_ensemble(dim, args.count, seed=args.seed, amplitude=args.amplitude)
        if dim == 2:
            ens = [volume_normalized(w) for w in ens]
        vals = np.array([det_quotient(tag, dim, w) for w in ens])
        sign = "+" if vals.min() >= 0 else "-" if vals.max() <= 0 else "mixed"
        print(f"{dim:3d} {tag.value:>8s} {vals.min():12.5g} {vals.max():12.5g}  {sign}")


if __name__ == "__main__":
    main()
