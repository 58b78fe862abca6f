"""Small-time heat-trace coefficients: closed forms and numerical fits.

Conventions: Tr exp(-tA) ~ sum_k a_k t^((k-n)/2l), with a_k = U_k vol(S^n)
on the unit round sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import IllConditioned, TailBudgetExceeded
from .spectra import Kind, OperatorSpec, SpectralSequence, choose_j_max, q_constant


@dataclass(frozen=True)
class CurvatureScalars:
    """Pointwise curvature scalars of a metric (constant on round spheres)."""

    K: float
    ric2: float
    riem2: float
    lapK: float
    J: float
    V2: float
    trV3: float
    dJ2: float


def round_curvature(n):
    """Curvature scalars of the unit round S^n, n >= 2 (real n allowed)."""
    if n < 2:
        raise ValueError("round_curvature needs n >= 2")
    n = float(n)
    return CurvatureScalars(
        K=n * (n - 1), ric2=n * (n - 1) ** 2, riem2=2 * n * (n - 1), lapK=0.0,
        J=n / 2, V2=n / 4, trV3=n / 8, dJ2=0.0,
    )


def sphere_volume(n):
    """vol(S^n) = 2 pi^((n+1)/2) / Gamma((n+1)/2); real n allowed."""
    return 2.0 * math.exp(0.5 * (n + 1) * math.log(math.pi) - gammaln(0.5 * (n + 1)))


def closed_form_U(a, n, cs):
    """(U0, U2, U4) of Delta + aK from the local curvature scalars."""
    pref = (4 * math.pi) ** (-n / 2)
    u0 = pref
    u2 = pref * (1 / 6 - a) * cs.K
    u4 = pref / 180 * (90 * (1 / 6 - a) ** 2 * cs.K**2 - cs.ric2 + cs.riem2
                       - 30 * (1 / 5 - a) * cs.lapK)
    return u0, u2, u4


def yamabe_coupling(n):
    """The a in Y = Delta + aK, (n-2)/(4(n-1))."""
    return (n - 2) / (4 * (n - 1))


def a6_conformal_laplacian(n, cs, *, form=1, q6=None, vol=None):
    """a_6[Y] for a conformally flat metric with (constant) scalars ``cs``.

    ``form=1`` is the |dJ|^2, J^3, J|V|^2, tr V^3 expression; ``form=2``
    isolates Q_6 (defaulting to the round value).  Both carry the factor
    (n - 8).  ``n`` may be any real number.
    """
    if vol is None:
        vol = sphere_volume(n)
    J, V2, T3, dJ2 = cs.J, cs.V2, cs.trV3, cs.dJ2
    if form == 1:
        bracket = (-3 * (n - 6) * dJ2 - (35 * n**2 - 266 * n + 456) / 9 * J**3
                   + 2 / 3 * (n - 1) * (7 * n - 30) * J * V2
                   - 2 / 9 * (5 * n**2 - 2 * n - 48) * T3)
        total = (n - 8) * bracket
    elif form == 2:
        if q6 is None:
            q6 = q_constant(n, 6)
        rest = (-13 / 6 * dJ2 - (125 * n - 314) / 36 * J**3 + 2 / 3 * (7 * n - 5) * J * V2
                - 2 / 9 * (5 * n + 28) * T3)
        total = -5 / 3 * (n - 8) * q6 + (n - 8) * (n - 6) * rest
    else:
        raise ValueError("form must be 1 or 2")
    return total * vol / ((4 * math.pi) ** (n / 2) * math.factorial(7))


def dirac_a2(n, integral_K=None):
    """a_2 of Dirac^2 on S^n: -(1/12) 2^[n/2] (4 pi)^(-n/2) int K."""
    if integral_K is None:
        integral_K = n * (n - 1) * sphere_volume(n)
    return -(2 ** (n // 2)) * (4 * math.pi) ** (-n / 2) * integral_K / 12


def _delta_plus_ak_a(spec):
    if spec.kind is Kind.LAPLACIAN:
        return 0.0
    if spec.kind is Kind.CONFORMAL_LAPLACIAN or (spec.kind is Kind.GJMS and spec.m == 2):
        return yamabe_coupling(spec.n)
    if spec.kind is Kind.LAPLACE_PLUS_AK:
        return spec.a
    return None


def known_heat_coefficients(spec):
    """Closed-form integrated coefficients ``{k: a_k}`` available for ``spec``.

    Covers a_0, a_2, a_4 of Delta + aK (with a_odd = 0), a_0 and a_2 of
    Dirac^2, a_6 of Y on S^6 and all of the circle.
    """
    n = spec.n
    if n == 1:
        if spec.kind in (Kind.LAPLACIAN, Kind.CONFORMAL_LAPLACIAN, Kind.LAPLACE_PLUS_AK):
            return {0: math.sqrt(math.pi), 1: 0.0, 2: 0.0, 3: 0.0}
        return {}
    vol = sphere_volume(n)
    cs = round_curvature(n)
    a = _delta_plus_ak_a(spec)
    if a is not None:
        u0, u2, u4 = closed_form_U(a, n, cs)
        out = {0: u0 * vol, 1: 0.0, 2: u2 * vol, 3: 0.0, 4: u4 * vol}
        if n == 6 and abs(a - yamabe_coupling(6)) < 1e-15:
            out[5] = 0.0
            out[6] = a6_conformal_laplacian(6, cs)
        return out
    if spec.kind is Kind.DIRAC_SQUARED:
        rank = 2 ** (n // 2)
        return {0: rank * (4 * math.pi) ** (-n / 2) * vol, 1: 0.0, 2: dirac_a2(n)}
    return {}


@dataclass(frozen=True)
class HeatFit:
    """Fitted heat coefficients.

    ``coeffs`` holds (k, a_k) for k = 0..k_max; ``extra`` the even nuisance
    terms beyond k_max that absorb asymptotic truncation error.
    """

    coeffs: list
    residual: float
    t_window: tuple
    extra: list = field(default_factory=list)
    cond: float = math.nan

    def as_dict(self, include_extra=False):
        d = dict(self.coeffs)
        if include_extra:
            d.update(self.extra)
        return d


def plain_heat_trace(seq, ts, budget=1e-12, j_cap=10**6, cache=None):
    """Tr exp(-tA) on an array of times, keeping the tail below ``budget``.

    ``cache`` (a :class:`~qcurv.cache.PartialSumCache`) stores the exact
    partial sums keyed by operator label, scale and truncation.
    """
    ts = np.asarray(ts, dtype=float)
    j = choose_j_max(seq, float(ts.min()), budget, j_cap=j_cap)
    if j is None:
        raise TailBudgetExceeded(f"heat trace tail above {budget} at t={ts.min()}")
    j = max(j, seq.j_max)
    label = f"{seq.spec.label}*{seq.scale!r}"
    out = np.empty(ts.size)
    todo = []
    for i, t in enumerate(ts.tolist()):
        hit = cache.get(label, j, t) if cache is not None else None
        if hit is None:
            todo.append(i)
        else:
            out[i] = hit
    if todo:
        full = seq.upto(j)
        terms = full.mult[None, :] * np.exp(-np.outer(ts[todo], full.lam))
        for i, row in zip(todo, terms.tolist()):
            out[i] = math.fsum(row)
            if cache is not None:
                cache.put(label, j, ts[i], out[i])
    return out


DEFAULT_WINDOW = (0.01, 0.2)


def default_window(l):
    """Fit window for an operator of order 2l; the expansion runs in t^(1/l).

    Beyond second order the expansion is only asymptotic and breaks down
    much earlier, so the window is pulled further towards t = 0.
    """
    lo, hi = DEFAULT_WINDOW[0] ** l, DEFAULT_WINDOW[1] ** l
    if l > 1:
        lo *= 1e-3 ** (l - 1)
        hi *= 0.025 ** (l - 1)
    return (lo, hi)


def fit_heat_coefficients(seq, n, l, k_max, *, t_window=None, npts=40, n_even=None,
                          fixed=None, cond_cap=1e12, cache=None):
    """Fit a_0..a_{k_max} of Tr exp(-tA) by weighted least squares.

    The even powers are fitted first, together with enough extra even
    powers to reach ``n_even`` terms; the odd coefficients are then read
    off the stage-one residual.  ``fixed`` pins known coefficients.
    ``t_window`` defaults to [0.01, 0.2] raised to the power l.  When
    ``n_even`` is not given it starts at 9 and is lowered until the
    condition number is below ``cond_cap``.
    """
    if t_window is None:
        t_window = default_window(l)
    fixed = dict(fixed or {})
    two_l = 2 * l
    ts = np.geomspace(t_window[0], t_window[1], npts)
    y = plain_heat_trace(seq, ts, cache=cache)
    w = ts ** (n / two_l)

    def col(k):
        return ts ** ((k - n) / two_l)

    for k, v in fixed.items():
        y = y - v * col(k)
    candidates = [n_even] if n_even is not None else list(range(9, 3, -1))
    for ne in candidates:
        n_top = max(k_max + (k_max % 2), 2 * (ne - 1))
        evens = [k for k in range(0, n_top + 1, 2) if k not in fixed]
        A = np.column_stack([col(k) for k in evens]) * w[:, None] if evens else np.zeros((npts, 0))
        cond = float(np.linalg.cond(A)) if evens else 1.0
        if cond <= cond_cap:
            break
    if cond > cond_cap:
        raise IllConditioned(f"fit condition number {cond:.2e} exceeds {cond_cap:.1e}")
    sol = np.linalg.lstsq(A, y * w, rcond=None)[0] if evens else np.array([])
    resid = y * w - (A @ sol if evens else 0.0)
    odds = [k for k in range(1, k_max + 1, 2) if k not in fixed]
    odd_sol = {}
    if odds:
        B = np.column_stack([col(k) for k in odds]) * w[:, None]
        osol = np.linalg.lstsq(B, resid, rcond=None)[0]
        resid = resid - B @ osol
        odd_sol = dict(zip(odds, osol.tolist()))
    values = dict(zip(evens, sol.tolist()))
    values.update(odd_sol)
    values.update(fixed)
    coeffs = [(k, float(values.get(k, 0.0))) for k in range(k_max + 1)]
    extra = [(k, float(values[k])) for k in sorted(values) if k > k_max]
    residual = float(np.max(np.abs(resid)))
    return HeatFit(coeffs, residual, (float(t_window[0]), float(t_window[1])), extra, cond)


def heat_coefficients_for(spec, seq=None, k_max=None, with_errors=False, *, t_window=None,
                          cache=None):
    """Heat coefficients for the zeta engine: closed forms, fit for the rest.

    Known closed-form values are pinned inside the fit so that only the
    missing coefficients are estimated numerically.  With ``with_errors``
    an uncertainty per fitted coefficient is returned as well, taken from
    the change under halving the upper end of the fit window.
    """
    n = spec.n
    if k_max is None:
        k_max = n + 2
    if seq is None:
        seq = SpectralSequence(spec, 64)
    known = {k: v for k, v in known_heat_coefficients(spec).items() if k <= k_max}
    if n == 1 and known:
        out = {k: known.get(k, 0.0) for k in range(k_max + 1)}
        return (out, {}) if with_errors else out
    window = default_window(spec.ell) if t_window is None else t_window
    fit = fit_heat_coefficients(seq, n, spec.ell, k_max, t_window=window, fixed=known, cache=cache)
    out = fit.as_dict(include_extra=True)
    vanishing_odd = spec.kind is not Kind.INTERTWINOR
    if vanishing_odd:
        for k in range(1, k_max + 1, 2):
            out[k] = 0.0
    if not with_errors:
        return out
    half = fit_heat_coefficients(seq, n, spec.ell, k_max, t_window=(window[0], window[1] / 2),
                                 fixed=known, cache=cache).as_dict(include_extra=True)
    errs = {}
    for k, v in out.items():
        if k in known or (vanishing_odd and k % 2):
            continue
        errs[k] = abs(v - half.get(k, v)) + 1e-14 * abs(v)
    return out, errs


__all__ = [
    "CurvatureScalars",
    "HeatFit",
    "OperatorSpec",
    "a6_conformal_laplacian",
    "closed_form_U",
    "default_window",
    "dirac_a2",
    "fit_heat_coefficients",
    "heat_coefficients_for",
    "known_heat_coefficients",
    "plain_heat_trace",
    "round_curvature",
    "sphere_volume",
    "yamabe_coupling",
]
