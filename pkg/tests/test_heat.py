import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcurv.errors import IllConditioned
from qcurv.heat import (
    CurvatureScalars,
    a6_conformal_laplacian,
    closed_form_U,
    default_window,
    dirac_a2,
    fit_heat_coefficients,
    heat_coefficients_for,
    known_heat_coefficients,
    plain_heat_trace,
    round_curvature,
    sphere_volume,
    yamabe_coupling,
)
from qcurv.spectra import OperatorSpec, SpectralSequence


def test_s2_laplacian_closed_form():
    cs = round_curvature(2)
    u0, u2, u4 = closed_form_U(0.0, 2, cs)
    vol = 4 * math.pi
    assert (u0 * vol, u2 * vol, u4 * vol) == pytest.approx((1.0, 1 / 3, 1 / 15), rel=1e-15)


def test_s2_laplacian_fit():
    fit = fit_heat_coefficients(SpectralSequence(OperatorSpec.laplacian(2), 64), 2, 1, 5)
    d = dict(fit.coeffs)
    assert d[0] == pytest.approx(1.0, rel=1e-9)
    assert d[2] == pytest.approx(1 / 3, rel=1e-9)
    assert d[4] == pytest.approx(1 / 15, rel=1e-6)
    for k in (1, 3, 5):
        assert abs(d[k]) < 1e-10


def test_s2_laplacian_against_mpmath_expansion():
    # sum (2j+1) e^{-t j(j+1)}: known expansion 1/t + 1/3 + t/15 + 4 t^2/315 + ...
    t = mpmath.mpf("0.002")
    with mpmath.workdps(30):
        exact = mpmath.nsum(lambda j: (2 * j + 1) * mpmath.exp(-t * j * (j + 1)), [0, mpmath.inf])
    model = 1 / t + mpmath.mpf(1) / 3 + t / 15 + 4 * t**2 / 315
    assert abs(exact - model) < 1e-8


@pytest.mark.parametrize("a", [0.0, 0.1, 1 / 6, -0.4])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_delta_plus_ak_fit_matches_closed_form(a, n):
    spec = OperatorSpec.laplace_plus_ak(n, a)
    closed = known_heat_coefficients(spec)
    fit = dict(fit_heat_coefficients(SpectralSequence(spec, 64), n, 1, 4).coeffs)
    for k in (0, 2, 4):
        assert fit[k] == pytest.approx(closed[k], rel=1e-5, abs=1e-9)


def test_circle_known_coefficients():
    assert known_heat_coefficients(OperatorSpec.laplacian(1))[0] == pytest.approx(math.sqrt(math.pi))


def test_dirac_a2_on_s2():
    assert dirac_a2(2) == pytest.approx(-1 / 3, rel=1e-14)
    fit = dict(fit_heat_coefficients(SpectralSequence(OperatorSpec.dirac_squared(2), 64), 2, 1, 4).coeffs)
    assert fit[2] == pytest.approx(-1 / 3, abs=1e-3)


def test_a6_two_forms_agree():
    for n in (3, 5, 6, 7, 9, 10):
        cs = round_curvature(n)
        assert a6_conformal_laplacian(n, cs, form=1) == pytest.approx(a6_conformal_laplacian(n, cs, form=2), rel=1e-12)
    # at n = 4 the round Q_6 has a denominator pole; its limit is 0
    cs = round_curvature(4)
    assert a6_conformal_laplacian(4, cs) == pytest.approx(a6_conformal_laplacian(4, cs, form=2, q6=0.0), rel=1e-12)


def test_a6_at_six_and_eight():
    assert a6_conformal_laplacian(6, round_curvature(6)) == pytest.approx(1 / 756, rel=1e-13)
    assert a6_conformal_laplacian(8, round_curvature(8)) == 0.0
    assert a6_conformal_laplacian(8, round_curvature(8), form=2) == 0.0


@given(st.floats(1e-4, 0.1))
def test_a6_has_a_simple_zero_at_eight(h):
    lo = a6_conformal_laplacian(8 - h, round_curvature(8 - h))
    hi = a6_conformal_laplacian(8 + h, round_curvature(8 + h))
    assert lo * hi < 0
    # slope is continuous through the zero
    assert lo / -h == pytest.approx(hi / h, rel=50 * h)


def test_a6_fit_on_s6():
    spec = OperatorSpec.conformal_laplacian(6)
    fit = dict(fit_heat_coefficients(SpectralSequence(spec, 64), 6, 1, 8).coeffs)
    assert fit[6] == pytest.approx(1 / 756, rel=5e-3)


def test_gjms_fit_on_s4():
    spec = OperatorSpec.gjms(4, 4)
    coeffs = heat_coefficients_for(spec)
    # a_4 - q is the conformal index -38/45
    assert coeffs[4] - 1 == pytest.approx(-38 / 45, abs=1e-6)
    assert coeffs[0] == pytest.approx(1 / 12, rel=1e-6)


def test_window_scaling():
    lo, hi = default_window(1)
    assert (lo, hi) == (0.01, 0.2)
    lo2, hi2 = default_window(2)
    assert lo2 < lo**2 and hi2 < hi**2


def test_ill_conditioned_fit():
    seq = SpectralSequence(OperatorSpec.laplacian(2), 64)
    with pytest.raises(IllConditioned):
        fit_heat_coefficients(seq, 2, 1, 5, t_window=(0.1, 0.1001), n_even=6)


def test_plain_heat_trace_matches_direct_sum():
    seq = SpectralSequence(OperatorSpec.laplacian(3), 400)
    for t in (0.05, 0.5):
        direct = math.fsum((seq.mult * np.exp(-t * seq.lam)).tolist())
        assert plain_heat_trace(seq, [t])[0] == pytest.approx(direct, rel=1e-14)


def test_volume_and_coupling():
    assert sphere_volume(2) == pytest.approx(4 * math.pi)
    assert sphere_volume(3) == pytest.approx(2 * math.pi**2)
    assert yamabe_coupling(4) == pytest.approx(1 / 6)
    assert isinstance(round_curvature(4.5), CurvatureScalars)
    with pytest.raises(ValueError):
        round_curvature(1)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(2.0, 9.0))
def test_u2_linear_in_coupling(a, n):
    cs = round_curvature(n)
    u2a = closed_form_U(a, n, cs)[1]
    u2b = closed_form_U(1 / 6, n, cs)[1]
    # (1/6 - a) K factor: vanishes at a = 1/6
    assert u2b == 0.0
    assert u2a == pytest.approx((4 * math.pi) ** (-n / 2) * (1 / 6 - a) * cs.K, rel=1e-12, abs=1e-300)
