"""Eigenvalue laws and multiplicities of natural operators on the round S^n.

Every supported operator is diagonal on the spherical-harmonic spaces E_j,
where the intertwinor "B" acts by j + (n-1)/2.  Spinor operators use the
analogous ladder with shift n/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import GammaPole, InvalidSpec
from .special import gamma_ratio


class Kind(enum.Enum):
    LAPLACIAN = "laplacian"
    CONFORMAL_LAPLACIAN = "conformal_laplacian"
    DIRAC_SQUARED = "dirac_squared"
    GJMS = "gjms"
    INTERTWINOR = "intertwinor"
    LAPLACE_PLUS_AK = "laplace_plus_ak"


@dataclass(frozen=True)
class OperatorSpec:
    """A sphere operator family together with its dimension and parameters.

    Use the classmethod constructors rather than filling fields by hand.
    ``m`` is only meaningful for GJMS, ``nu`` for the intertwinor and
    ``a`` for Delta + aK.
    """

    kind: Kind
    n: int
    m: int = 0
    nu: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidSpec(f"sphere dimension must be a positive integer, got {self.n}")
        if self.kind is Kind.GJMS:
            if self.m <= 0 or self.m % 2:
                raise InvalidSpec(f"GJMS order must be a positive even integer, got {self.m}")
            if self.n % 2 == 0 and self.m > self.n:
                raise InvalidSpec(f"P_{self.m} does not exist in even dimension {self.n}")
        if self.kind is Kind.DIRAC_SQUARED and self.n < 2:
            raise InvalidSpec("Dirac^2 needs n >= 2")

    @classmethod
    def laplacian(cls, n):
        return cls(Kind.LAPLACIAN, n)

    @classmethod
    def conformal_laplacian(cls, n):
        return cls(Kind.CONFORMAL_LAPLACIAN, n)

    @classmethod
    def dirac_squared(cls, n):
        return cls(Kind.DIRAC_SQUARED, n)

    @classmethod
    def gjms(cls, n, m):
        return cls(Kind.GJMS, n, m=int(m))

    @classmethod
    def intertwinor(cls, n, nu):
        return cls(Kind.INTERTWINOR, n, nu=float(nu))

    @classmethod
    def laplace_plus_ak(cls, n, a):
        return cls(Kind.LAPLACE_PLUS_AK, n, a=float(a))

    @property
    def order2l(self):
        """Operator order 2l (2*nu, possibly non-integer, for intertwinors)."""
        if self.kind is Kind.GJMS:
            return self.m
        if self.kind is Kind.INTERTWINOR:
            return 2.0 * self.nu
        return 2

    @property
    def ell(self):
        return self.order2l / 2

    @property
    def label(self):
        extra = {Kind.GJMS: f",m={self.m}", Kind.INTERTWINOR: f",nu={self.nu!r}",
                 Kind.LAPLACE_PLUS_AK: f",a={self.a!r}"}.get(self.kind, "")
        return f"{self.kind.value}(n={self.n}{extra})"

    def validate_for_norm(self):
        if self.kind is Kind.INTERTWINOR and not abs(self.nu) < self.n / 2:
            raise InvalidSpec(f"complementary series needs |nu| < n/2, got nu={self.nu}")


def harmonic_multiplicity(n, j):
    """dim E_j, the degree-j spherical harmonics on S^n (exact integer)."""
    if n < 1 or j < 0:
        raise ValueError("need n >= 1 and j >= 0")
    if j == 0:
        return 1
    if n == 1:
        return 2
    return math.comb(j + n, n) - math.comb(j + n - 2, n)


def dirac_multiplicity(n, j):
    """Total multiplicity of the eigenvalue (j + n/2)^2 of Dirac^2 on S^n.

    Both signs of the Dirac eigenvalue are counted together.
    """
    if n < 2 or j < 0:
        raise ValueError("need n >= 2 and j >= 0")
    return 2 * 2 ** (n // 2) * math.comb(j + n - 1, j)


def _multiplicity_real(spec, x):
    # multiplicity law continued to real degree x >= 0
    x = np.asarray(x, dtype=float)
    n = spec.n
    if spec.kind is Kind.DIRAC_SQUARED:
        return 2.0 * 2 ** (n // 2) * np.exp(gammaln(x + n) - gammaln(x + 1) - gammaln(n))
    if n == 1:
        return np.where(x == 0, 1.0, 2.0)
    return (2 * x + n - 1) * np.exp(gammaln(x + n - 1) - gammaln(x + 1) - gammaln(n))


def multiplicities(spec, j):
    """Vectorised multiplicity of the j-th eigenvalue, as floats."""
    j = np.asarray(j)
    if j.ndim == 0:
        f = dirac_multiplicity if spec.kind is Kind.DIRAC_SQUARED else harmonic_multiplicity
        return float(f(spec.n, int(j)))
    out = _multiplicity_real(spec, j)
    return np.rint(out) if j.size and j.max() < 2000 else out


def eigenvalue(spec, j):
    """Eigenvalue of ``spec`` on the degree-j eigenspace (vectorised in j)."""
    jj = np.asarray(j, dtype=float)
    n = spec.n
    b = jj + (n - 1) / 2
    kind = spec.kind
    if kind is Kind.LAPLACIAN:
        out = jj * (jj + n - 1)
    elif kind is Kind.CONFORMAL_LAPLACIAN:
        out = b * b - 0.25
    elif kind is Kind.GJMS:
        out = np.ones_like(b)
        for k in range(1, spec.m // 2 + 1):
            out = out * (b * b - (k - 0.5) ** 2)
    elif kind is Kind.INTERTWINOR:
        # A_{2nu} = G(B + nu + 1/2) / G(B - nu + 1/2)
        out = gamma_ratio(b + 0.5, spec.nu, -spec.nu)
    elif kind is Kind.DIRAC_SQUARED:
        out = (jj + n / 2) ** 2
    elif kind is Kind.LAPLACE_PLUS_AK:
        out = jj * (jj + n - 1) + spec.a * n * (n - 1)
    else:  # pragma: no cover
        raise InvalidSpec(kind)
    if np.ndim(j) == 0:
        return float(out)
    return np.asarray(out, dtype=float)


def q_constant(n, m):
    """Round-sphere Q_m curvature, G((n+m)/2) / G((n-m+2)/2)."""
    top, bottom = (n + m) / 2, (n - m + 2) / 2
    for arg in (top, bottom):
        if arg <= 0 and float(arg).is_integer():
            raise GammaPole(f"Gamma argument {arg} is a pole")
    return gamma_ratio(0.0, top, bottom)


def _log_concave_tail(spec):
    # kinds whose term j -> m_j exp(-t lam_j) is log-concave for every t > 0
    if spec.kind is Kind.INTERTWINOR:
        return spec.nu >= 0.5
    if spec.kind is Kind.GJMS:
        return spec.m <= spec.n
    return True


@dataclass(frozen=True)
class SpectralSequence:
    """Eigenvalues and multiplicities for j = 0..j_max of one operator.

    ``scale`` multiplies every eigenvalue (used for the dilation law).
    The sequence can be re-enumerated to any depth with :meth:`upto`.
    """

    spec: OperatorSpec
    j_max: int
    scale: float = 1.0
    lam: np.ndarray = field(init=False, repr=False, compare=False)
    mult: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        js = np.arange(self.j_max + 1)
        lam = self.scale * eigenvalue(self.spec, js)
        mult = multiplicities(self.spec, js)
        object.__setattr__(self, "lam", np.atleast_1d(lam))
        object.__setattr__(self, "mult", np.atleast_1d(mult))

    @property
    def entries(self):
        return list(zip(self.lam.tolist(), [int(m) for m in self.mult]))

    @cached_property
    def zero_mask(self):
        return np.abs(self.lam) <= 1e-12 * self.scale

    @property
    def q(self):
        """Multiplicity of the eigenvalue 0."""
        return int(self.mult[self.zero_mask].sum())

    @property
    def neg_count(self):
        return int(self.mult[(self.lam < 0) & ~self.zero_mask].sum())

    def upto(self, j_max):
        if j_max == self.j_max:
            return self
        return SpectralSequence(self.spec, int(j_max), self.scale)

    def scaled(self, factor):
        return replace(self, scale=self.scale * factor)

    def _term(self, x, t):
        x = np.asarray(x, dtype=float)
        lam = self.scale * eigenvalue(self.spec, x)
        return _multiplicity_real(self.spec, x) * np.exp(-t * np.abs(lam))

    def tail_bound(self, j_max, t):
        """Upper bound on sum_{j > j_max} m_j exp(-t |lam_j|).

        Uses the geometric ratio bound when the terms are log-concave in j,
        otherwise an integral comparison once the terms are decreasing.
        """
        f1, f2 = self._term([j_max + 1, j_max + 2], t)
        if f1 == 0.0:
            return 0.0
        if _log_concave_tail(self.spec):
            r = f2 / f1
            if r < 1.0:
                return float(f1 / (1.0 - r))
            return math.inf
        f0 = float(self._term(j_max, t))
        if not f1 < f0:
            return math.inf
        val, _ = integrate.quad(lambda x: float(self._term(x, t)), j_max, np.inf, limit=200)
        return float(val)


def build_sequence(spec, j_max):
    """Enumerate eigenvalues/multiplicities of ``spec`` for j = 0..j_max."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    return SpectralSequence(spec, int(j_max))


def choose_j_max(seq, t, budget, j_cap=10**6):
    """Smallest j_max whose certified heat-trace tail at ``t`` is <= budget.

    Returns ``None`` when even ``j_cap`` does not meet the budget.
    """
    if seq.tail_bound(0, t) <= budget:
        return 0
    hi = 1
    while seq.tail_bound(hi, t) > budget:
        if hi >= j_cap:
            return None
        hi = min(2 * hi, j_cap)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.tail_bound(mid, t) <= budget:
            hi = mid
        else:
            lo = mid
    return hi
