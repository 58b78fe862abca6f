"""Curvature of conformal metrics g_w = exp(2w) g_0 on the round sphere.

All fields are axisymmetric.  Tensors are stored by their two distinct
eigenvalues as endomorphisms (index raised with g_w): the theta-theta
component and the common value on the n - 1 tangential directions.
The Laplacian is the positive one, Delta = -trace Hess.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TraceMismatch, ZeroDenominator
from .harmonic import (
    DEFAULT_N,
    AxisymField,
    apply_spectral,
    grad_dot,
    grad_norm_sq,
    hessian_axisym,
    integrate,
    laplacian,
)
from .heat import sphere_volume
from .spectra import OperatorSpec, q_constant

TRACE_TOL = 1e-8


@dataclass(frozen=True)
class ConformalFactorSpec:
    """A Moebius boost of rapidity ``alpha`` along the zonal axis."""

    alpha: float


def boost_log_factor(spec, n, N=DEFAULT_N):
    """w(theta) = -log(cosh a - sinh a cos theta), the log of the boost factor."""
    a = float(spec.alpha if isinstance(spec, ConformalFactorSpec) else spec)
    return AxisymField.from_function(n, lambda x: -np.log(np.cosh(a) - np.sinh(a) * x), N)


def _delta0(w):
    return apply_spectral(OperatorSpec.laplacian(w.n), w)


def _j_numerator(w, n):
    # F = J_0 + Delta_0 w - (n-2)/2 |dw|^2, so that J_w = exp(-2w) F
    return n / 2 + _delta0(w) - 0.5 * (n - 2) * grad_norm_sq(w)


def scalar_transform(w, n=None):
    """J_w = exp(-2w) (J_0 + Delta_0 w - (n-2)/2 |dw|^2)."""
    n = w.n if n is None else n
    if n < 2:
        raise ValueError("scalar_transform needs n >= 2")
    return (-2.0 * w).exp() * _j_numerator(w, n)


def _j_derivatives(w, n):
    """(Delta_0 J, <dw, dJ>_0, |dJ|^2_0) for J = exp(-2w) F by the product rule.

    Only w and F are differentiated; both are smooth (F is a polynomial
    when w is), which keeps rounding noise out of the high modes.
    """
    E = (-2.0 * w).exp()
    F = _j_numerator(w, n)
    dw2 = grad_norm_sq(w)
    lap_J = E * (F * (-2.0 * _delta0(w) - 4.0 * dw2) + _delta0(F) + 4.0 * grad_dot(w, F))
    dw_dJ = E * (-2.0 * F * dw2 + grad_dot(w, F))
    dJ2 = E**2 * (4.0 * F**2 * dw2 - 4.0 * F * grad_dot(w, F) + grad_norm_sq(F))
    return lap_J, dw_dJ, dJ2


def conformal_laplacian_fn(w, u):
    """Delta_w u = exp(-2w) (Delta_0 u - (n-2) <dw, du>_0) for g_w = exp(2w) g_0."""
    n = w.n
    return (-2.0 * w).exp() * (_delta0(u) - (n - 2) * grad_dot(w, u))


def gauss_residual(w, K_w=None):
    """sup |Delta_0 w + 1 - exp(2w) K_w / 2| on S^2.

    With ``K_w=None`` the curvature comes from :func:`scalar_transform`
    (spectral Laplacian) while the residual uses the Hessian trace, so the
    two routes cross-check each other.  Pass ``K_w=2`` to test that w
    yields the round metric.
    """
    if w.n != 2:
        raise ValueError("the Gauss equation check is for n = 2")
    if K_w is None:
        K_w = 2.0 * scalar_transform(w, 2)
    K_vals = K_w.values if isinstance(K_w, AxisymField) else np.full(w.N, float(K_w))
    res = laplacian(w).values + 1.0 - np.exp(2 * w.values) * K_vals / 2
    return float(np.max(np.abs(res)))


@dataclass(frozen=True, eq=False)
class CurvatureState:
    """Pointwise curvature of g_w.

    ``V_tt``/``V_tan`` are the eigenvalues of the Schouten endomorphism;
    ``dJ2`` is |dJ|^2 measured in g_w; ``Q4`` is only set when n = 4.
    """

    n: int
    omega: AxisymField
    J: AxisymField
    V_tt: AxisymField
    V_tan: AxisymField
    dJ2: AxisymField
    Q4: AxisymField | None = None

    @property
    def V2(self):
        return self.V_tt**2 + (self.n - 1) * self.V_tan**2

    @property
    def trV3(self):
        return self.V_tt**3 + (self.n - 1) * self.V_tan**3

    @property
    def J3(self):
        return self.J**3

    @property
    def JV2(self):
        return self.J * self.V2

    def trace(self):
        return self.V_tt + (self.n - 1) * self.V_tan

    def to_csv(self):
        cols = [("J", self.J), ("V_tt", self.V_tt), ("V_tan", self.V_tan), ("dJ2", self.dJ2)]
        if self.Q4 is not None:
            cols.append(("Q4", self.Q4))
        head = "cos_theta," + ",".join(c for c, _ in cols)
        rows = [head]
        x = self.omega.grid.x.tolist()
        vals = [f.values.tolist() for _, f in cols]
        for i, xi in enumerate(x):
            rows.append(",".join([repr(xi)] + [repr(v[i]) for v in vals]))
        return "\n".join(rows) + "\n"


def schouten_transform(w, n=None):
    """Curvature state of g_w from V_w = V_0 - Hess w + dw (x) dw - |dw|^2 g_0 / 2."""
    n = w.n if n is None else n
    if n < 3:
        raise ValueError("the Schouten tensor needs n >= 3")
    h_tt, h_tan = hessian_axisym(w)
    g2 = grad_norm_sq(w)
    e2 = (-2.0 * w).exp()
    # frame components w.r.t. g_0, then raised with g_w
    v_tt = e2 * (0.5 - h_tt + 0.5 * g2)
    v_tan = e2 * (0.5 - h_tan - 0.5 * g2)
    J = scalar_transform(w, n)
    trace = v_tt + (n - 1) * v_tan
    scale = max(1.0, J.sup())
    gap = float(np.max(np.abs(trace.values - J.values)))
    if gap > TRACE_TOL * scale:
        raise TraceMismatch(f"trace of V differs from J by {gap:.2e}")
    lap_J, dw_dJ, dJ2_0 = _j_derivatives(w, n)
    dJ2 = e2 * dJ2_0
    q4 = None
    if n == 4:
        v2 = v_tt**2 + (n - 1) * v_tan**2
        # Delta_w J = exp(-2w) (Delta_0 J - (n-2) <dw, dJ>_0)
        q4 = (n / 2) * J**2 - 2.0 * v2 + e2 * (lap_J - (n - 2) * dw_dJ)
    return CurvatureState(n, w, J, v_tt, v_tan, dJ2, q4)


def q4_prescribed(w):
    """exp(-4w) ((P_4)_0 w + (Q_4)_0) on S^4."""
    if w.n != 4:
        raise ValueError("Q_4 prescription is checked on S^4")
    p4w = apply_spectral(OperatorSpec.gjms(4, 4), w)
    return (-4.0 * w).exp() * (p4w + q_constant(4, 4))


def q4_two_path_residual(w):
    """sup |Q_4 from curvature - Q_4 from the spectral prescription|."""
    a = schouten_transform(w, 4).Q4
    b = q4_prescribed(w)
    return float(np.max(np.abs(a.values - b.values)))


def conformal_index_residual(w, n, invariant):
    """|int (inv dv)_w - int (inv dv)_0| for K on S^2 or Q_4 on S^4."""
    if n != w.n:
        raise ValueError("dimension mismatch")
    inv = str(invariant).lower()
    if inv in ("k_dim2", "k"):
        if n != 2:
            raise ValueError("K_dim2 needs n = 2")
        field = 2.0 * scalar_transform(w, 2)
        base = 2.0 * sphere_volume(2)
    elif inv in ("q4_dim4", "q4"):
        if n != 4:
            raise ValueError("Q4_dim4 needs n = 4")
        field = schouten_transform(w, 4).Q4
        base = q_constant(4, 4) * sphere_volume(4)
    else:
        raise ValueError(f"unknown invariant {invariant!r}")
    vol_w = np.exp(n * w.values)
    val = integrate(field * vol_w, "dv")
    return abs(val - base)


def yamabe_quotient(f, n=None):
    """int u Y u d(xi) / (int |u|^p d(xi))^(2/p), p = 2n/(n-2)."""
    n = f.n if n is None else n
    if n < 3:
        raise ValueError("Yamabe quotient needs n >= 3")
    p = 2 * n / (n - 2)
    num = integrate(f * apply_spectral(OperatorSpec.conformal_laplacian(n), f))
    den = integrate(f.apply(lambda v: np.abs(v) ** p))
    if den == 0.0:
        raise ZeroDenominator("u vanishes identically")
    return num / den ** (2 / p)


__all__ = [
    "ConformalFactorSpec",
    "CurvatureState",
    "boost_log_factor",
    "conformal_index_residual",
    "conformal_laplacian_fn",
    "gauss_residual",
    "q4_prescribed",
    "q4_two_path_residual",
    "scalar_transform",
    "schouten_transform",
    "yamabe_quotient",
]
