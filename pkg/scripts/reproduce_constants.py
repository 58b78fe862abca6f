"""Print the spectral constants: determinants, zeta(0) values and heat coefficients."""

import argparse
import math

from qcurv.heat import a6_conformal_laplacian, heat_coefficients_for, round_curvature
from qcurv.spectra import OperatorSpec, SpectralSequence
from qcurv.zeta import HurwitzOracle, zeta_zero_and_det

OPERATORS = [
    OperatorSpec.laplacian(1),
    OperatorSpec.laplacian(2),
    OperatorSpec.dirac_squared(2),
    OperatorSpec.laplacian(4),
    OperatorSpec.conformal_laplacian(4),
    OperatorSpec.gjms(4, 4),
    OperatorSpec.conformal_laplacian(6),
    OperatorSpec.dirac_squared(4),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--j-max", type=int, default=64)
    args = ap.parse_args()
    print(f"{'operator':34s} {'zeta(0)':>14s} {'zeta_prime(0)':>18s} {'det':>16s} {'oracle dz':>10s}")
    for spec in OPERATORS:
        seq = SpectralSequence(spec, args.j_max)
        coeffs, errs = heat_coefficients_for(spec, seq, with_errors=True)
        res = zeta_zero_and_det(seq, coeffs, coeff_err=errs)
        try:
            _, zp = HurwitzOracle(spec).zero()
            gap = f"{abs(zp - res.zeta_prime0):.1e}"
        except ValueError:
            gap = "-"
        print(f"{spec.label:34s} {res.zeta0:14.10f} {res.zeta_prime0:18.12f} {res.det:16.10f} {gap:>10s}")
    print()
    print(f"(2 pi)^2 = {(2 * math.pi) ** 2:.12f}")
    for n in (6, 8):
        print(f"a6[Y] on S^{n} = {a6_conformal_laplacian(n, round_curvature(n))!r}")


if __name__ == "__main__":
    main()
