"""Spectral calculus for axisymmetric functions on S^n.

Functions of the polar angle are expanded in zonal harmonics, which are
Gegenbauer polynomials in x = cos(theta) with parameter (n-1)/2.  The basis
p_j is orthonormal for the normalized measure d(xi) (total mass 1), and the
collocation grid is the matching Gauss rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AliasingWarning
from .spectra import eigenvalue

DEFAULT_N = 256
ALIAS_TOL = 1e-10


def _recurrence(n, size):
    """Off-diagonal a_1..a_size of the Jacobi matrix for the zonal measure."""
    lam = (n - 1) / 2
    j = np.arange(1, size + 1, dtype=float)
    if lam == 0:
        # Chebyshev (circle) case
        a = np.full(size, 0.5)
        a[0] = math.sqrt(0.5)
        return a
    return np.sqrt(j * (j + 2 * lam - 1) / (4 * (j + lam) * (j + lam - 1)))


def basis_matrices(n, x, degree, derivs=2):
    """p_j(x) and its first ``derivs`` x-derivatives for j < degree.

    Returns a list of arrays of shape (len(x), degree), built from the
    three-term recurrence x p_j = a_{j+1} p_{j+1} + a_j p_{j-1}.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = _recurrence(n, degree)
    out = [np.zeros((x.size, degree)) for _ in range(derivs + 1)]
    out[0][:, 0] = 1.0
    for j in range(degree - 1):
        prev = [o[:, j - 1] if j > 0 else 0.0 for o in out]
        aj = a[j - 1] if j > 0 else 0.0
        cur = [o[:, j] for o in out]
        nxt = (x * cur[0] - aj * prev[0]) / a[j]
        out[0][:, j + 1] = nxt
        for d in range(1, derivs + 1):
            # d-th derivative of x p_j is x p_j^(d) + d p_j^(d-1)
            out[d][:, j + 1] = (x * cur[d] + d * cur[d - 1] - aj * prev[d]) / a[j]
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Gauss rule for the zonal measure on S^n with N nodes.

    ``x`` are the nodes cos(theta_i) in increasing order, ``w`` the weights
    (summing to 1), ``P``, ``P1``, ``P2`` the basis and its x-derivatives at
    the nodes.
    """

    n: int
    N: int
    x: np.ndarray
    w: np.ndarray
    P: np.ndarray
    P1: np.ndarray
    P2: np.ndarray

    @cached_property
    def theta(self):
        return np.arccos(self.x)

    @cached_property
    def pole_values(self):
        """p_j(1) = sqrt(dim E_j)."""
        return basis_matrices(self.n, [1.0], self.N, derivs=0)[0][0]


@lru_cache(maxsize=32)
def build_grid(n, N=DEFAULT_N):
    """Quadrature exact for polynomials in cos(theta) of degree <= 2N - 1."""
    if N < 8:
        raise ValueError("grid size must be at least 8")
    if n < 1:
        raise ValueError("sphere dimension must be positive")
    a = _recurrence(n, N - 1)
    x = eigh_tridiagonal(np.zeros(N), a, eigvals_only=True)
    x = np.sort(np.clip(x, -1.0, 1.0))
    for _ in range(2):
        # Newton polish on p_N(x) = 0
        pn, dpn = (m[:, -1] for m in basis_matrices(n, x, N + 1, derivs=1))
        x = np.clip(x - pn / dpn, -1.0, 1.0)
    P, P1, P2 = basis_matrices(n, x, N)
    # Christoffel weights are accurate even where they are tiny
    w = 1.0 / np.sum(P * P, axis=1)
    w = w / math.fsum(w)
    for arr in (x, w, P, P1, P2):
        arr.setflags(write=False)
    return Grid(n, N, x, w, P, P1, P2)


class AxisymField:
    """An axisymmetric function on S^n, held as grid values and/or coefficients.

    Instances are immutable.  Whichever representation was not supplied is
    computed on first access and cached.
    """

    __slots__ = ("grid", "_values", "_coeffs", "__weakref__")

    def __init__(self, grid, values=None, coeffs=None, *, check_alias=False):
        if (values is None) == (coeffs is None):
            raise ValueError("give exactly one of values or coeffs")
        self.grid = grid
        self._values = None if values is None else _frozen(values, grid.N)
        self._coeffs = None if coeffs is None else _frozen_coeffs(coeffs, grid.N)
        if check_alias and values is not None:
            _alias_check(self.coeffs)

    # construction helpers
    @classmethod
    def from_function(cls, n, func, N=DEFAULT_N):
        """Sample ``func(x)`` with x = cos(theta) on the grid."""
        g = build_grid(n, N)
        return cls(g, values=np.asarray(func(g.x), dtype=float) * np.ones(N))

    @classmethod
    def constant(cls, n, c=1.0, N=DEFAULT_N):
        g = build_grid(n, N)
        return cls(g, values=np.full(N, float(c)))

    @classmethod
    def zonal(cls, n, j, N=DEFAULT_N):
        """The orthonormal zonal harmonic of degree j."""
        g = build_grid(n, N)
        c = np.zeros(N)
        c[j] = 1.0
        return cls(g, coeffs=c)

    @property
    def n(self):
        return self.grid.n

    @property
    def N(self):
        return self.grid.N

    @property
    def values(self):
        if self._values is None:
            object.__setattr__(self, "_values", _frozen(self.grid.P @ self._coeffs, self.N))
        return self._values

    @property
    def coeffs(self):
        if self._coeffs is None:
            c = self.grid.P.T @ (self.grid.w * self._values)
            object.__setattr__(self, "_coeffs", _frozen_coeffs(c, self.N))
        return self._coeffs

    def with_values(self, values):
        return AxisymField(self.grid, values=values)

    def apply(self, func):
        """Pointwise ``func`` of the values (a new field)."""
        return self.with_values(func(self.values))

    def _binary(self, other, op):
        if isinstance(other, AxisymField):
            if other.grid is not self.grid:
                raise ValueError("fields live on different grids")
            other = other.values
        return self.with_values(op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return self.with_values(-self.values)

    def __pow__(self, p):
        return self.with_values(self.values**p)

    def exp(self):
        return self.with_values(np.exp(self.values))

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        return f"AxisymField(n={self.n}, N={self.N})"

    def to_csv(self):
        """Two-column table cos(theta),value with round-trip float repr."""
        lines = ["cos_theta,value"]
        lines += [f"{x!r},{v!r}" for x, v in zip(self.grid.x.tolist(), self.values.tolist())]
        return "\n".join(lines) + "\n"


def _frozen(arr, N):
    arr = np.array(arr, dtype=float).reshape(-1)
    if arr.size != N:
        raise ValueError(f"expected {N} values, got {arr.size}")
    arr.setflags(write=False)
    return arr


def _frozen_coeffs(arr, N):
    arr = np.array(arr, dtype=float).reshape(-1)
    if arr.size > N:
        raise ValueError(f"at most {N} coefficients fit on this grid")
    if arr.size < N:
        arr = np.concatenate([arr, np.zeros(N - arr.size)])
    arr.setflags(write=False)
    return arr


def _alias_check(c):
    total = float(np.dot(c, c))
    if total == 0.0:
        return
    tail = float(np.dot(c[3 * c.size // 4:], c[3 * c.size // 4:]))
    if tail > ALIAS_TOL * total:
        warnings.warn(f"trailing coefficient energy {tail / total:.2e} of total; "
                      "the field is under-resolved", AliasingWarning, stacklevel=3)


CHOP_TOL = 1e-14


def chopped(c, tol=None):
    """Zero the trailing coefficients that sit in the rounding-noise plateau.

    Noise in a tail is harmless for values but is amplified by up to j^4
    under differentiation, so the derivative routines drop it.  The cut
    is placed where the coefficients fall below ten times the plateau seen
    in the last quarter (and never above ``CHOP_TOL`` times the largest).
    """
    c = np.asarray(c)
    top = np.max(np.abs(c), initial=0.0)
    if top == 0.0:
        return np.zeros_like(c)
    if tol is None:
        plateau = np.max(np.abs(c[3 * c.size // 4:]))
        if plateau > 1e-11 * top:
            return np.array(c)
        thresh = max(10 * plateau, CHOP_TOL * top)
    else:
        thresh = tol * top
    big = np.flatnonzero(np.abs(c) > thresh)
    out = np.array(c)
    out[big[-1] + 1:] = 0.0
    return out


def analyze(f):
    """Orthonormal zonal coefficients of ``f``; warns when under-resolved."""
    c = f.coeffs
    _alias_check(c)
    return np.array(c)


def synthesize(coeffs, n, N=DEFAULT_N):
    """Field with the given zonal coefficients on the (n, N) grid."""
    return AxisymField(build_grid(n, N), coeffs=coeffs)


def apply_multiplier(f, mult):
    """Multiply coefficient j by ``mult[j]``."""
    return AxisymField(f.grid, coeffs=chopped(f.coeffs) * np.asarray(mult, dtype=float))


@lru_cache(maxsize=128)
def _eigen_table(spec, N):
    tab = np.asarray(eigenvalue(spec, np.arange(N)), dtype=float)
    tab.setflags(write=False)
    return tab


def apply_spectral(spec, f):
    """Apply the sphere operator ``spec`` (diagonal on E_j) to ``f``."""
    if spec.n != f.n:
        raise ValueError(f"operator lives on S^{spec.n}, field on S^{f.n}")
    return apply_multiplier(f, _eigen_table(spec, f.N))


@dataclass(frozen=True)
class Conformal:
    """Measure e^{n omega} times the base measure ("xi" or "dv")."""

    omega: AxisymField
    base: str = "xi"


def conformal(omega, base="xi"):
    return Conformal(omega, base)


def sphere_volume(n):
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def integrate(f, measure="xi"):
    """Integral of ``f`` over S^n.

    ``measure`` is "xi" (normalized, total mass 1), "dv" (unit round volume)
    or a :class:`Conformal` wrapper for the volume of e^{2 omega} g_0.
    """
    g = f.grid
    vals = f.values if isinstance(f, AxisymField) else np.broadcast_to(np.asarray(f, float), (g.N,))
    if isinstance(measure, Conformal):
        if measure.omega.grid is not g:
            raise ValueError("omega must share the grid of the integrand")
        vals = vals * np.exp(g.n * measure.omega.values)
        measure = measure.base
    total = math.fsum((g.w * vals).tolist())
    if measure == "xi":
        return total
    if measure == "dv":
        return total * sphere_volume(g.n)
    raise ValueError(f"unknown measure {measure!r}")


# ---------------------------------------------------------------- derivatives


def x_derivatives(f):
    """(f_x, f_xx) on the grid, with x = cos(theta)."""
    c = chopped(f.coeffs)
    return f.grid.P1 @ c, f.grid.P2 @ c


def evaluate(f, x, deriv=0):
    """Evaluate ``f`` or one of its x-derivatives at arbitrary x in [-1, 1]."""
    mats = basis_matrices(f.n, x, f.N, derivs=deriv)
    out = mats[deriv] @ (chopped(f.coeffs) if deriv else f.coeffs)
    return out if np.ndim(x) else float(out[0])


def derivative_theta(f, theta=None):
    """f'(theta) = -sin(theta) f_x, at the nodes or at the given angles.

    This is odd under theta -> -theta, so it is returned as an array rather
    than as a zonal field.
    """
    if theta is None:
        fx, _ = x_derivatives(f)
        return -np.sqrt(1 - f.grid.x**2) * fx
    theta = np.asarray(theta, dtype=float)
    return -np.sin(theta) * evaluate(f, np.cos(theta), deriv=1)


def grad_norm_sq(f):
    """|df|^2 = f'(theta)^2 = (1 - x^2) f_x^2."""
    fx, _ = x_derivatives(f)
    return f.with_values((1 - f.grid.x**2) * fx**2)


def hessian_axisym(f):
    """Round-metric Hessian components (H_theta_theta, H_tangential).

    H_tt = f''(theta) = (1 - x^2) f_xx - x f_x and H_tan = cot(theta) f'(theta)
    = -x f_x, regular at both poles.
    """
    fx, fxx = x_derivatives(f)
    x = f.grid.x
    return f.with_values((1 - x**2) * fxx - x * fx), f.with_values(-x * fx)


def laplacian(f):
    """Positive Laplacian -(H_tt + (n-1) H_tan) in the geometric form."""
    h_tt, h_tan = hessian_axisym(f)
    return -(h_tt + (f.n - 1) * h_tan)


def grad_dot(f, g):
    """<df, dg> = (1 - x^2) f_x g_x for two fields on one grid."""
    fx, _ = x_derivatives(f)
    gx, _ = x_derivatives(g)
    return f.with_values((1 - f.grid.x**2) * fx * gx)


# ---------------------------------------------------------------- ensembles


def pole_normalized_basis(grid, degree):
    """Coefficient vectors of P_j = p_j / p_j(1) (value 1 at the north pole)."""
    out = np.zeros((degree + 1, grid.N))
    for j in range(degree + 1):
        out[j, j] = 1.0 / grid.pole_values[j]
    return out


def random_bandlimited(n, rng, *, degree=8, amplitude=0.3, sup_max=1.0, N=DEFAULT_N):
    """Random zonal field sum_{j<=degree} c_j P_j with c_j ~ U[-amplitude, amplitude].

    P_j is normalized to 1 at the pole; the field is scaled down to sup-norm
    ``sup_max`` if it exceeds it.
    """
    g = build_grid(n, N)
    c = rng.uniform(-amplitude, amplitude, size=degree + 1)
    coeffs = c @ pole_normalized_basis(g, degree)
    f = AxisymField(g, coeffs=coeffs)
    s = f.sup()
    if s > sup_max:
        f = AxisymField(g, coeffs=coeffs * (sup_max / s))
    return f


def random_ensemble(n, count, seed=42, **kw):
    """``count`` random bandlimited fields from one seeded generator."""
    rng = np.random.default_rng(seed)
    return [random_bandlimited(n, rng, **kw) for _ in range(count)]


__all__ = [
    "AxisymField",
    "Conformal",
    "DEFAULT_N",
    "Grid",
    "analyze",
    "apply_multiplier",
    "apply_spectral",
    "basis_matrices",
    "build_grid",
    "conformal",
    "derivative_theta",
    "evaluate",
    "grad_dot",
    "grad_norm_sq",
    "hessian_axisym",
    "integrate",
    "laplacian",
    "pole_normalized_basis",
    "random_bandlimited",
    "random_ensemble",
    "synthesize",
    "x_derivatives",
]
