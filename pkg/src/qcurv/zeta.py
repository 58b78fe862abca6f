"""Spectral zeta functions, their continuation to s = 0, and determinants.

Two independent routes are provided:

* ``MellinSplit`` -- the heat-trace route.  Gamma(s) zeta(s) is split at
  t = 1; the small-time part subtracts the supplied heat coefficients and
  the large-time part is summed mode by mode with incomplete Gammas.
* ``ClosedFormOracle`` -- for eigenvalue laws (j + beta)^2 - c with
  polynomial multiplicities, a binomial expansion into Hurwitz zetas
  (evaluated with mpmath).  It never looks at heat coefficients.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import exp1, gamma as gamma_fn, gammaincc

from .errors import PoleHit, QuadratureFailure, TailBudgetExceeded
from .spectra import Kind, OperatorSpec, SpectralSequence, choose_j_max

EULER_GAMMA = 0.57721566490153286061


def _exp(x):
    return math.exp(x) if x < 709.0 else math.inf


class Method(enum.Enum):
    MELLIN_SPLIT = "MellinSplit"
    CLOSED_FORM_ORACLE = "ClosedFormOracle"


@dataclass(frozen=True)
class ZetaResult:
    """Outcome of a zeta evaluation.

    ``value`` is zeta(s).  The s = 0 quantities are NaN when the result
    came from a generic-s evaluation.
    """

    s: complex
    value: complex
    zeta0: float
    zeta_prime0: float
    det: float
    method: Method
    err_estimate: float
    neg_count: int = 0


# --------------------------------------------------------------------------
# heat traces


def _modes(seq, t, tol, j_cap):
    """Nonzero modes needed so that the heat-trace tail at t is below tol."""
    j_max = choose_j_max(seq, t, tol, j_cap=j_cap)
    if j_max is None:
        raise TailBudgetExceeded(f"tail at t={t} exceeds {tol} even at j_max={j_cap}")
    full = seq.upto(max(j_max, seq.j_max))
    keep = ~full.zero_mask
    return np.abs(full.lam[keep]), full.mult[keep], full, seq.tail_bound(full.j_max, t)


def heat_trace(seq, t, tol=1e-14, j_cap=10**6):
    """Z(t) = sum_j m_j exp(-t lam_j) for an operator with no negative modes."""
    lam, mult, full, _ = _modes(seq, t, tol, j_cap)
    return math.fsum((mult * np.exp(-t * lam)).tolist()) + full.q


def modified_heat_trace(seq, t, tol=1e-14, j_cap=10**6):
    """Sum over nonzero eigenvalues of exp(-t |lam_j|).

    Equals Z(t) - q + 2 sum_{lam_j < 0} sinh(lam_j t).  The certified tail
    bound is kept below ``tol``; ``TailBudgetExceeded`` is raised otherwise.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    lam, mult, _, _ = _modes(seq, t, tol, j_cap)
    return math.fsum((mult * np.exp(-t * lam)).tolist())


# --------------------------------------------------------------------------
# MellinSplit


def _as_dict(heat_coeffs):
    if isinstance(heat_coeffs, dict):
        return {int(k): float(v) for k, v in heat_coeffs.items()}
    return {int(k): float(v) for k, v in heat_coeffs}


def modified_coefficients(seq, heat_coeffs):
    """Asymptotic model of the modified trace as ``{exponent: coefficient}``.

    The exponent of a_k is (k - n)/2l.  The zero modes move a_n, and the
    Taylor series of 2 sinh(lam t) for negative modes feeds the integer
    exponents up to the largest supplied one.
    """
    n, two_l = seq.spec.n, seq.spec.order2l
    model = {}
    for k, ak in sorted(_as_dict(heat_coeffs).items()):
        model[Fraction(k - n, 1) / Fraction(two_l).limit_denominator(10**6)] = ak
    model[Fraction(0)] = model.get(Fraction(0), 0.0) - seq.q
    negs = [(lam, m) for lam, m in zip(seq.lam, seq.mult) if lam < 0 and abs(lam) > 1e-12]
    if negs:
        top = max(model)
        p = 1
        while p <= top:
            add = sum(2.0 * m * lam**p / math.factorial(p) for lam, m in negs)
            model[Fraction(p)] = model.get(Fraction(p), 0.0) + add
            p += 2
    return dict(sorted(model.items()))


@dataclass
class _Split:
    """Shared state for one MellinSplit evaluation."""

    seq: SpectralSequence
    model: dict
    t_c: float
    tol: float
    j_cap: int

    coeff_err: dict = None

    def __post_init__(self):
        self.lam, self.mult, _, tail = _modes(self.seq, self.t_c, self.tol * 1e-2, self.j_cap)
        self.trunc_err = tail * abs(math.log(self.t_c)) * 1e2
        # rounding floor of the cancelling sum at t_c, integrated in log t
        scale_tc = float(np.sum(self.mult * np.exp(-self.t_c * self.lam)))
        self.noise = 4 * np.finfo(float).eps * scale_tc * abs(math.log(self.t_c))
        self.exps = [float(p) for p in self.model]
        self.coefs = list(self.model.values())
        self.next_exp = max(self.exps) + 1.0 / self.seq.spec.ell

    def remainder(self, t):
        terms = (self.mult * np.exp(-t * self.lam)).tolist()
        terms += [-c * t**p for p, c in zip(self.exps, self.coefs)]
        return math.fsum(terms)

    def small_time(self, s):
        """Integral over (0, 1] of t^(s-1) R(t) with its error estimate."""
        lo = math.log(self.t_c)
        parts, err = [], 0.0
        funcs = [lambda u: (math.exp(u * s.real) * math.cos(u * s.imag)) * self.remainder(math.exp(u))]
        if s.imag:
            funcs.append(lambda u: (math.exp(u * s.real) * math.sin(u * s.imag)) * self.remainder(math.exp(u)))
        for f in funcs:
            with warnings.catch_warnings():
                # the returned error estimate is checked explicitly below
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, e = integrate.quad(f, lo, 0.0, epsabs=self.tol * 1e-1, epsrel=1e-13, limit=400)
            if not e <= max(1e2 * self.tol, 1e1 * self.noise):
                raise QuadratureFailure(f"small-time integral reached only {e:.2e}")
            parts.append(val)
            err += e
        core = complex(parts[0], parts[1] if len(parts) > 1 else 0.0)
        # below t_c: R(t) ~ R(t_c) (t/t_c)^q with q the first omitted exponent
        r_c = self.remainder(self.t_c)
        q = self.next_exp
        corr = r_c * self.t_c**s / (s + q)
        return core + corr, err + abs(corr) + self.trunc_err + self.noise

    def coefficient_error(self, s):
        """Propagated effect of heat-coefficient uncertainties on Gamma(s) zeta(s).

        A shift d in the coefficient of t^p changes the pole sum, the
        subtracted integral and the near-zero model by
        d t_c^(s+p) (1/(s+p) - 1/(s+q)); at s + p = 0 the first factor is
        replaced by log(1/t_c).
        """
        if not self.coeff_err:
            return 0.0, 0.0
        n, two_l = self.seq.spec.n, self.seq.spec.order2l
        q = self.next_exp
        tot, at_pole = 0.0, 0.0
        for k, d in self.coeff_err.items():
            p = (k - n) / two_l
            sp = s + p
            if abs(sp) < 1e-12:
                at_pole += abs(d)
                tot += abs(d) * (abs(math.log(self.t_c)) + 1 / abs(s + q))
            else:
                tot += abs(d) * abs(self.t_c ** sp) * abs(1 / sp - 1 / (s + q))
        return tot, at_pole

    def large_time(self, s):
        """Integral over [1, oo) of t^(s-1) Z~(t), summed mode by mode."""
        sigma = s.real if isinstance(s, complex) else s
        a = max(sigma - 1.0, 0.0)
        lam_all, mult_all = self.lam, self.mult
        # t^(sigma-1) <= exp(a (t-1)) on t >= 1
        keep = lam_all - a < 60.0 + 10 * a
        lam, mult = lam_all[keep], mult_all[keep]
        dropped = float(np.sum(mult_all[~keep] * np.exp(-lam_all[~keep]) / (lam_all[~keep] - a)))
        if s == 0:
            val = math.fsum((mult * exp1(lam)).tolist())
        elif not s.imag and s.real > 0:
            sr = s.real
            val = math.fsum((mult * lam ** (-sr) * gammaincc(sr, lam) * gamma_fn(sr)).tolist())
        else:
            val = complex(mpmath.fsum(m * lm ** (-s) * mpmath.gammainc(s, lm)
                                       for lm, m in zip(lam.tolist(), mult.tolist())))
        return val, dropped + self.trunc_err

    def pole_sum(self, s):
        total = 0.0
        for p, c in zip(self.exps, self.coefs):
            if c == 0.0:
                continue
            if abs(s + p) < 1e-12:
                raise PoleHit(f"s = {s} is the pole of the t^{p} heat term")
            total += c / (s + p)
        return total


def _build_split(seq, heat_coeffs, t_c, tol, j_cap, coeff_err=None):
    if t_c is None:
        t_c = 0.01 ** seq.spec.ell
    return _Split(seq, modified_coefficients(seq, heat_coeffs), t_c, tol, j_cap, coeff_err)


def zeta_continued(seq, heat_coeffs, s, *, t_c=None, tol=1e-12, j_cap=10**6, coeff_err=None):
    """zeta_A(s) by the Mellin split, for s away from the poles.

    ``heat_coeffs`` lists (k, a_k) of the plain heat trace for k = 0..n at
    least; more terms improve the small-time subtraction.  ``coeff_err``
    maps k to an uncertainty in a_k, propagated into ``err_estimate``.
    """
    s = complex(s)
    if s == 0:
        return zeta_zero_and_det(seq, heat_coeffs, t_c=t_c, tol=tol, j_cap=j_cap, coeff_err=coeff_err)
    if s.imag == 0 and s.real < 0 and s.real.is_integer():
        raise PoleHit("Gamma(s) has a pole here; only s = 0 is handled by the Laurent route")
    split = _build_split(seq, heat_coeffs, t_c, tol, j_cap, coeff_err)
    poles = split.pole_sum(s)
    small, e1 = split.small_time(s)
    large, e2 = split.large_time(s)
    e3, _ = split.coefficient_error(s)
    g = complex(mpmath.gamma(s))
    value = (poles + small + large) / g
    nan = math.nan
    err = (e1 + e2 + e3) / abs(g)
    return ZetaResult(s, value, nan, nan, nan, Method.MELLIN_SPLIT, err, seq.neg_count)


def zeta_zero_and_det(seq, heat_coeffs, *, t_c=None, tol=1e-12, j_cap=10**6, coeff_err=None):
    """zeta(0), zeta'(0) and the signed determinant by the Mellin split.

    Near s = 0, Gamma(s) zeta(s) = c_{-1}/s + c_0 + O(s), so
    zeta(0) = c_{-1} and zeta'(0) = c_0 + gamma_E c_{-1}.
    """
    split = _build_split(seq, heat_coeffs, t_c, tol, j_cap, coeff_err)
    c_m1 = split.model.get(Fraction(0), 0.0)
    c0 = 0.0
    for p, c in zip(split.exps, split.coefs):
        if p != 0.0:
            c0 += c / p
    small, e1 = split.small_time(0.0)
    large, e2 = split.large_time(0.0)
    c0 += small.real + large
    zp = c0 + EULER_GAMMA * c_m1
    det = (-1) ** seq.neg_count * _exp(-zp)
    e3, e_pole = split.coefficient_error(0.0)
    err = e1 + e2 + e3 + EULER_GAMMA * e_pole
    return ZetaResult(0j, complex(c_m1), c_m1, zp, det, Method.MELLIN_SPLIT, err, seq.neg_count)


# --------------------------------------------------------------------------
# direct Dirichlet summation (Re s > n/2l)


def dirichlet_zeta(seq, s, tol=1e-13, j_min=200):
    """sum_{lam_j != 0} m_j |lam_j|^-s with an Euler-Maclaurin tail.

    Only valid where the series converges; the tail integral is taken over
    the real-degree continuation of the eigenvalue and multiplicity laws.
    """
    spec = seq.spec
    if not s > spec.n / spec.order2l:
        raise ValueError("direct summation needs s > n/2l")
    from .spectra import _multiplicity_real, eigenvalue

    def f(x):
        return float(_multiplicity_real(spec, x) * abs(seq.scale * eigenvalue(spec, x)) ** (-s))

    J = max(j_min, seq.j_max)
    full = seq.upto(J)
    keep = ~full.zero_mask
    head = math.fsum((full.mult[keep] * np.abs(full.lam[keep]) ** (-s)).tolist())
    a = J + 1
    tail_int, e = integrate.quad(f, a, np.inf, epsabs=tol * 1e-2, epsrel=1e-14, limit=400)
    h = 1e-3 * a
    d1 = (f(a + h) - f(a - h)) / (2 * h)
    d3 = (f(a + 2 * h) - 2 * f(a + h) + 2 * f(a - h) - f(a - 2 * h)) / (2 * h**3)
    # sum_{j >= a} f(j) = int_a^oo f + f(a)/2 - f'(a)/12 + f'''(a)/720 - ...
    tail = tail_int + f(a) / 2 - d1 / 12 + d3 / 720
    return head + tail


# --------------------------------------------------------------------------
# Hurwitz closed-form oracle


def quadratic_law(spec):
    """(beta, c, multiplicity-poly roots, leading constant) when lam = (j+beta)^2 - c.

    Returns None for operators outside that family.
    """
    n = spec.n
    if spec.kind is Kind.DIRAC_SQUARED:
        beta, c = Fraction(n, 2), Fraction(0)
        lead = Fraction(2 * 2 ** (n // 2), math.factorial(n - 1))
        roots = [Fraction(-i) for i in range(1, n)]
        return beta, c, roots, lead, False
    if spec.kind is Kind.GJMS and spec.m != 2:
        return None
    if spec.kind is Kind.INTERTWINOR:
        return None
    beta = Fraction(n - 1, 2)
    if spec.kind is Kind.LAPLACIAN:
        c = beta * beta
    elif spec.kind in (Kind.CONFORMAL_LAPLACIAN, Kind.GJMS):
        c = Fraction(1, 4)
    else:
        c = beta * beta - Fraction(spec.a).limit_denominator(10**12) * n * (n - 1)
    if n == 1:
        return beta, c, [], Fraction(2), True
    lead = Fraction(2, math.factorial(n - 1))
    roots = [Fraction(-(n - 1), 2)] + [Fraction(-i) for i in range(1, n - 1)]
    return beta, c, roots, lead, False


def _poly_in_shifted(roots, lead, beta):
    # m(j) = lead * prod (j - r); rewrite in x = j + beta, coefficients low -> high
    poly = [lead]
    for r in roots:
        shift = -(r + beta)  # (j - r) = x - (r + beta)
        new = [Fraction(0)] * (len(poly) + 1)
        for i, coef in enumerate(poly):
            new[i + 1] += coef
            new[i] += coef * shift
        poly = new
    return poly


class HurwitzOracle:
    """Exact-series zeta for lam_j = (j + beta)^2 - c, m_j polynomial in j."""

    def __init__(self, spec, dps=30, scale=1.0):
        law = quadratic_law(spec)
        if law is None:
            raise ValueError(f"no closed-form oracle for {spec.label}")
        self.spec = spec
        self.beta, self.c, roots, lead, self.circle = law
        self.dps = dps
        self.scale = scale
        self.mu = _poly_in_shifted(roots, lead, self.beta)
        j0 = 1 if self.circle else 0
        while (j0 + self.beta) ** 2 < 4 * abs(self.c) or (j0 + self.beta) ** 2 - self.c <= 0:
            j0 += 1
        self.j0 = j0

    def _head(self):
        from .spectra import multiplicities

        out = []
        for j in range(self.j0):
            lam = (j + self.beta) ** 2 - self.c
            if lam != 0:
                out.append((mpmath.mpf(lam.numerator) / lam.denominator, int(multiplicities(self.spec, j))))
        return out

    def _kmax(self, b):
        ratio = abs(float(self.c)) / float(b) ** 2
        if ratio == 0:
            return 0
        return int(math.ceil((self.dps + 5) * math.log(10) / -math.log(float(ratio)))) + 2

    def zeta(self, s):
        with mpmath.workdps(self.dps):
            s = mpmath.mpmathify(s)
            b = mpmath.mpf(self.j0) + mpmath.mpf(self.beta.numerator) / self.beta.denominator
            c = mpmath.mpf(self.c.numerator) / self.c.denominator
            total = mpmath.fsum(m * lam ** (-s) for lam, m in self._head())
            for k in range(self._kmax(b) + 1):
                bk = mpmath.binomial(-s, k) * (-c) ** k
                for i, mu in enumerate(self.mu):
                    if mu == 0:
                        continue
                    arg = 2 * s + 2 * k - i
                    if abs(arg - 1) < mpmath.mpf(10) ** (-20):
                        raise PoleHit(f"zeta has a pole at s = {s}")
                    total += bk * (mpmath.mpf(mu.numerator) / mu.denominator) * mpmath.zeta(arg, b)
            return complex(total * mpmath.mpf(self.scale) ** (-s))

    def zero(self):
        """(zeta(0), zeta'(0)) from the Laurent data of the Hurwitz zetas."""
        with mpmath.workdps(self.dps):
            b = mpmath.mpf(self.j0) + mpmath.mpf(self.beta.numerator) / self.beta.denominator
            c = mpmath.mpf(self.c.numerator) / self.c.denominator
            head = self._head()
            z0 = mpmath.mpf(sum(m for _, m in head))
            zp = -mpmath.fsum(m * mpmath.log(abs(lam)) for lam, m in head)
            for k in range(self._kmax(b) + 1):
                harm = mpmath.fsum(mpmath.mpf(1) / r for r in range(1, k)) if k > 1 else mpmath.mpf(0)
                for i, mu in enumerate(self.mu):
                    if mu == 0:
                        continue
                    mu_f = mpmath.mpf(mu.numerator) / mu.denominator
                    if k == 0:
                        z0 += mu_f * mpmath.zeta(-i, b)
                        zp += 2 * mu_f * mpmath.zeta(-i, b, 1)
                    elif 2 * k - i == 1:
                        z0 += c**k * mu_f / (2 * k)
                        zp += c**k * mu_f / k * (harm / 2 - mpmath.digamma(b))
                    else:
                        zp += c**k * mu_f * mpmath.zeta(2 * k - i, b) / k
            zp_total = zp - z0 * mpmath.log(self.scale)
            return float(z0), float(zp_total)


def zeta_closed_form(spec, s=0, scale=1.0):
    """ClosedFormOracle result at ``s`` (s = 0 fills zeta0/zeta'(0)/det)."""
    oracle = HurwitzOracle(spec, scale=scale)
    seq_neg = sum(int(m) for lam, m in oracle._head() if lam < 0)
    if complex(s) == 0:
        z0, zp = oracle.zero()
        det = (-1) ** seq_neg * _exp(-zp)
        return ZetaResult(0j, complex(z0), z0, zp, det, Method.CLOSED_FORM_ORACLE, 1e-20, seq_neg)
    val = oracle.zeta(s)
    nan = math.nan
    return ZetaResult(complex(s), val, nan, nan, nan, Method.CLOSED_FORM_ORACLE, 1e-20, seq_neg)


__all__ = [
    "EULER_GAMMA",
    "HurwitzOracle",
    "Method",
    "OperatorSpec",
    "ZetaResult",
    "dirichlet_zeta",
    "heat_trace",
    "modified_coefficients",
    "modified_heat_trace",
    "quadratic_law",
    "zeta_closed_form",
    "zeta_continued",
    "zeta_zero_and_det",
]
