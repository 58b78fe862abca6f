"""Conformally invariant functionals on S^2, S^4, S^6 and their couplings.

Sign convention for :func:`det_quotient`: the returned value is a positive
multiple of zeta'_w(0) - zeta'_0(0) = -log(det A_w / det A_0).  A value
that is >= 0 across the conformal class therefore means the (penalized)
determinant is maximal at the round metric.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .conformal import schouten_transform, scalar_transform
from .errors import UnsupportedPair, ZeroDenominator
from .harmonic import AxisymField, apply_spectral, integrate
from .spectra import OperatorSpec, q_constant


# ------------------------------------------------------------------ F-functionals


def F0(w, n=None):
    """n/(2 Gamma(n)) int w (P_n)_0 w d(xi) - log int exp(n (w - wbar)) d(xi)."""
    n = w.n if n is None else n
    if n not in (2, 4, 6):
        raise ValueError("F0 is defined here for n in {2, 4, 6}")
    pw = apply_spectral(OperatorSpec.gjms(n, n), w)
    quad = n / (2 * q_constant(n, n)) * integrate(w * pw)
    wbar = integrate(w)
    return quad - math.log(integrate((n * (w - wbar)).exp()))


def F0_coefficient_form(w, n=None):
    """F0 with the quadratic term as a weighted coefficient sum (cross-check)."""
    n = w.n if n is None else n
    lam = OperatorSpec.gjms(n, n)
    from .spectra import eigenvalue

    c = w.coeffs
    quad = n / (2 * q_constant(n, n)) * math.fsum((eigenvalue(lam, np.arange(c.size)) * c * c).tolist())
    wbar = integrate(w)
    return quad - math.log(integrate((n * (w - wbar)).exp()))


def F1_dim4(w):
    """int J_w^2 exp(4w) d(xi) - int J_0^2 d(xi), with J_0 = 2."""
    if w.n != 4:
        raise ValueError("F1_dim4 needs n = 4")
    J = scalar_transform(w, 4)
    return integrate(J * J, _conf(w)) - 4.0


def _conf(w):
    from .harmonic import conformal

    return conformal(w)


F2_BASE = 2 * 27.0
F3_BASE = 28 / 5 * 27.0 - 48 / 5 * 3.0 * 1.5


def F123_dim6(w):
    """(F1, F2, F3) on S^6 with every density taken in g_w."""
    if w.n != 6:
        raise ValueError("F123_dim6 needs n = 6")
    st = schouten_transform(w, 6)
    m = _conf(w)
    dj2 = integrate(st.dJ2, m)
    j3 = integrate(st.J**3, m)
    jv2 = integrate(st.J * st.V2, m)
    f1 = dj2
    f2 = dj2 + 2 * j3 - F2_BASE
    f3 = dj2 + 28 / 5 * j3 - 48 / 5 * jv2 - F3_BASE
    return f1, f2, f3


# ------------------------------------------------------------------ couplings


class OperatorTag(enum.Enum):
    Y = "Y"
    DIRAC_SQ = "DiracSq"
    PANEITZ = "Paneitz"


@dataclass(frozen=True)
class CouplingTable:
    """Weights of (F0, F1[, F2, F3]) in the determinant functional of ``tag``."""

    dim: int
    operator_tag: OperatorTag
    weights: tuple


DIM2_CONSTANT = 1 / (12 * math.pi)

COUPLINGS = {
    (2, OperatorTag.Y): CouplingTable(2, OperatorTag.Y, (DIM2_CONSTANT,)),
    (2, OperatorTag.DIRAC_SQ): CouplingTable(2, OperatorTag.DIRAC_SQ, (-DIM2_CONSTANT,)),
    (4, OperatorTag.Y): CouplingTable(4, OperatorTag.Y, (-3.0, -2.0)),
    (4, OperatorTag.DIRAC_SQ): CouplingTable(4, OperatorTag.DIRAC_SQ, (33.0, 7.0)),
    (4, OperatorTag.PANEITZ): CouplingTable(4, OperatorTag.PANEITZ, (21.0, -16.0)),
    (6, OperatorTag.Y): CouplingTable(6, OperatorTag.Y, (600.0, 6.0, 23.0, 10.0)),
    (6, OperatorTag.DIRAC_SQ): CouplingTable(6, OperatorTag.DIRAC_SQ, (-11460.0, -93.0, -556.0, -365.0)),
}


def coupling(tag, dim):
    tag = OperatorTag(tag) if not isinstance(tag, OperatorTag) else tag
    try:
        return COUPLINGS[(dim, tag)]
    except KeyError:
        raise UnsupportedPair(f"no coupling for {tag.value} in dimension {dim}") from None


def dim2_polyakov_term(w):
    """int {w Delta_0 w / 2 + w J_0} dv_0 on S^2 (J_0 = 1)."""
    if w.n != 2:
        raise ValueError("needs n = 2")
    lap = apply_spectral(OperatorSpec.laplacian(2), w)
    return integrate(0.5 * w * lap + w, "dv")


def functional_vector(w):
    """(F0, F1, ...) appropriate to the dimension of ``w``."""
    n = w.n
    if n == 4:
        return (F0(w), F1_dim4(w))
    if n == 6:
        return (F0(w),) + F123_dim6(w)
    if n == 2:
        return (F0(w),)
    raise ValueError(f"no functional list in dimension {n}")


def det_quotient(tag, dim, w):
    """Coupled determinant functional (positive multiple of the zeta' change)."""
    table = coupling(tag, dim)
    if w.n != dim:
        raise ValueError("dimension mismatch")
    if dim == 2:
        return table.weights[0] * dim2_polyakov_term(w)
    vals = functional_vector(w)
    return math.fsum(a * f for a, f in zip(table.weights, vals))


def volume_normalized(w):
    """Shift w by a constant so that int exp(n w) d(xi) = 1."""
    return w - math.log(integrate(w.apply(lambda v: np.exp(w.n * v)))) / w.n


class LeadingForm(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    INDEFINITE = "Indefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"


LOWER_THRESHOLD = -8 / 15
UPPER_THRESHOLD = -1 / 3


def classify_leading_form(a):
    """Type of the leading quadratic form of F0 + a F1 on S^4."""
    if a <= LOWER_THRESHOLD:
        return LeadingForm.POSITIVE_DEFINITE
    if a < UPPER_THRESHOLD:
        return LeadingForm.INDEFINITE
    return LeadingForm.NEGATIVE_DEFINITE


# ------------------------------------------------------------------ complementary series


def intertwinor_apply(psi, nu):
    return apply_spectral(OperatorSpec.intertwinor(psi.n, nu), psi)


def comp_series_inner(phi, psi, nu, n=None):
    """(phi, psi)_nu = int phi A_{2nu} psi d(xi) for real fields."""
    n = phi.n if n is None else n
    OperatorSpec.intertwinor(n, nu).validate_for_norm()
    return integrate(phi * intertwinor_apply(psi, nu))


def gram_matrix(n, nu, degree=20, N=64):
    """Gram matrix of (., .)_nu on the first ``degree`` orthonormal zonal harmonics."""
    basis = [AxisymField.zonal(n, j, N) for j in range(degree)]
    images = [intertwinor_apply(b, nu) for b in basis]
    return np.array([[integrate(a * b) for b in images] for a in basis])


def lp_norm(f, p):
    return integrate(f.apply(lambda v: np.abs(v) ** p)) ** (1 / p)


def beckner_exponent(n, nu, convention="mobius"):
    """L^p exponent for the Beckner ratio.

    ``"mobius"`` is 2n/(n - 2 nu), for which the trial Omega^(n/2 - nu)
    has Moebius-invariant norm; ``"printed"`` is 2n/(n + 2 nu).
    """
    if convention == "mobius":
        return 2 * n / (n - 2 * nu)
    if convention == "printed":
        return 2 * n / (n + 2 * nu)
    raise ValueError(f"unknown exponent convention {convention!r}")


def beckner_ratio(phi, psi, nu, n=None, *, convention="mobius"):
    """|(phi, psi)_nu| / (||phi||_p ||psi||_p)."""
    n = phi.n if n is None else n
    p = beckner_exponent(n, nu, convention)
    den = lp_norm(phi, p) * lp_norm(psi, p)
    if den == 0.0:
        raise ZeroDenominator("trial function vanishes")
    return abs(comp_series_inner(phi, psi, nu, n)) / den


def beckner_trial(n, nu, alpha, N=None):
    """Omega_alpha^(n/2 - nu), the conformal extremal candidate."""
    from .conformal import boost_log_factor
    from .harmonic import DEFAULT_N

    w = boost_log_factor(alpha, n, N or DEFAULT_N)
    return ((n / 2 - nu) * w).exp()


# ------------------------------------------------------------------ reports


@dataclass
class FunctionalReport:
    """A named result with its error estimate and provenance."""

    name: str
    value: float
    err_estimate: float
    inputs: dict = field(default_factory=dict)
    provenance: str = ""

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)

    @staticmethod
    def csv_header():
        return ["name", "value", "err_estimate", "inputs", "provenance"]

    def csv_row(self):
        return [self.name, repr(float(self.value)), repr(float(self.err_estimate)),
                json.dumps(self.inputs, sort_keys=True, default=_jsonable), self.provenance]


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


def reports_to_csv(reports):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(FunctionalReport.csv_header())
    for r in reports:
        wr.writerow(r.csv_row())
    return buf.getvalue()


def reports_to_json(reports):
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2, default=_jsonable) + "\n"


def report_with_refinement(name, make_field, func, N, inputs=None, provenance=""):
    """Evaluate ``func(make_field(N))`` and estimate its error against N/2."""
    val = func(make_field(N))
    coarse = func(make_field(max(N // 2, 8)))
    err = abs(val - coarse) + 1e-15 * max(1.0, abs(val))
    return FunctionalReport(name, float(val), float(err), dict(inputs or {}, N=N), provenance)


__all__ = [
    "COUPLINGS",
    "CouplingTable",
    "F0",
    "F0_coefficient_form",
    "F123_dim6",
    "F1_dim4",
    "FunctionalReport",
    "LeadingForm",
    "OperatorTag",
    "beckner_exponent",
    "beckner_ratio",
    "beckner_trial",
    "classify_leading_form",
    "comp_series_inner",
    "coupling",
    "det_quotient",
    "dim2_polyakov_term",
    "functional_vector",
    "gram_matrix",
    "lp_norm",
    "report_with_refinement",
    "reports_to_csv",
    "reports_to_json",
    "volume_normalized",
]
