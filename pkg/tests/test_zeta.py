import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcurv.errors import PoleHit
from qcurv.heat import heat_coefficients_for
from qcurv.spectra import OperatorSpec, SpectralSequence
from qcurv.zeta import (
    HurwitzOracle,
    Method,
    dirichlet_zeta,
    heat_trace,
    modified_coefficients,
    modified_heat_trace,
    zeta_closed_form,
    zeta_continued,
    zeta_zero_and_det,
)


def _mellin(spec, j_max=64, **kw):
    seq = SpectralSequence(spec, j_max)
    coeffs, errs = heat_coefficients_for(spec, seq, with_errors=True)
    return seq, coeffs, zeta_zero_and_det(seq, coeffs, coeff_err=errs, **kw)


def test_circle_determinant():
    _, _, res = _mellin(OperatorSpec.laplacian(1))
    assert res.method is Method.MELLIN_SPLIT
    assert res.det == pytest.approx(4 * math.pi**2, abs=1e-9)
    # zeta'(0) = 4 zeta_R'(0) = -2 log(2 pi)
    assert res.zeta_prime0 == pytest.approx(-2 * math.log(2 * math.pi), abs=1e-12)


def test_s2_zeta_prime_against_riemann():
    # zeta'(0) of the S^2 Laplacian: 4 zeta_R'(-1) - 1/2
    expect = float(4 * mpmath.zeta(-1, derivative=1) - 0.5)
    _, _, res = _mellin(OperatorSpec.laplacian(2))
    assert res.zeta_prime0 == pytest.approx(expect, abs=1e-11)
    assert zeta_closed_form(OperatorSpec.laplacian(2)).zeta_prime0 == pytest.approx(expect, abs=1e-14)


def test_dirac_s2_is_shifted_riemann():
    # lam = (j+1)^2 with multiplicity 4(j+1): zeta = 4 zeta_R(2s - 1)
    _, _, res = _mellin(OperatorSpec.dirac_squared(2))
    assert res.zeta0 == pytest.approx(-1 / 3, abs=1e-12)
    expect = float(8 * mpmath.zeta(-1, derivative=1))
    assert res.zeta_prime0 == pytest.approx(expect, abs=1e-11)


@pytest.mark.parametrize("spec", [
    OperatorSpec.laplacian(3),
    OperatorSpec.laplacian(4),
    OperatorSpec.conformal_laplacian(3),
    OperatorSpec.conformal_laplacian(4),
    OperatorSpec.dirac_squared(4),
    OperatorSpec.laplace_plus_ak(2, 0.3),
    OperatorSpec.laplace_plus_ak(2, -1.0),
])
def test_mellin_matches_hurwitz_oracle(spec):
    _, _, res = _mellin(spec)
    z0, zp = HurwitzOracle(spec).zero()
    assert res.zeta0 == pytest.approx(z0, abs=1e-8)
    assert res.zeta_prime0 == pytest.approx(zp, abs=max(1e-8, 10 * res.err_estimate))
    assert abs(res.zeta_prime0 - zp) <= max(res.err_estimate, 1e-12) * 10


def test_negative_mode_sign():
    spec = OperatorSpec.laplace_plus_ak(2, -1.0)
    _, _, res = _mellin(spec)
    assert res.neg_count == 1
    assert res.det < 0
    assert res.zeta0 == pytest.approx(-2 / 3, abs=1e-10)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.25])
def test_continuation_agrees_with_direct_sum(s):
    spec = OperatorSpec.laplacian(2)
    seq = SpectralSequence(spec, 64)
    coeffs = heat_coefficients_for(spec, seq)
    res = zeta_continued(seq, coeffs, s)
    assert res.value.real == pytest.approx(dirichlet_zeta(seq, s), rel=1e-10)


@pytest.mark.parametrize("s", [0.3 + 0.5j, -0.25, -1.3 + 0.2j])
def test_continuation_agrees_with_oracle_off_axis(s):
    spec = OperatorSpec.laplacian(3)
    seq = SpectralSequence(spec, 64)
    coeffs = heat_coefficients_for(spec, seq)
    res = zeta_continued(seq, coeffs, s)
    expect = HurwitzOracle(spec).zeta(s)
    assert abs(res.value - expect) < 1e-8 * max(1.0, abs(expect))


def test_pole_hit():
    spec = OperatorSpec.laplacian(2)
    seq = SpectralSequence(spec, 16)
    with pytest.raises(PoleHit):
        zeta_continued(seq, heat_coefficients_for(spec, seq), -1)


def test_circle_heat_trace_poisson():
    # sum_{j in Z} exp(-t j^2) = sqrt(pi/t) sum_k exp(-pi^2 k^2 / t)
    seq = SpectralSequence(OperatorSpec.laplacian(1), 8)
    for t in (0.01, 0.3, 2.0):
        dual = math.sqrt(math.pi / t) * math.fsum(math.exp(-math.pi**2 * k * k / t) for k in range(-20, 21))
        assert heat_trace(seq, t) == pytest.approx(dual, rel=1e-13)
        assert modified_heat_trace(seq, t) == pytest.approx(dual - 1.0, rel=1e-12)


def test_modified_coefficients_shift_zero_mode():
    seq = SpectralSequence(OperatorSpec.laplacian(2), 8)
    model = modified_coefficients(seq, {0: 1.0, 2: 1 / 3, 4: 1 / 15})
    exps = sorted(float(p) for p in model)
    assert exps == [-1.0, 0.0, 1.0]
    assert model[min(model)] == 1.0
    assert float(model[sorted(model)[1]]) == pytest.approx(1 / 3 - 1)


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.0, 1.0))
def test_scaling_law(alpha):
    # lam -> exp(-2 l alpha) lam: zeta'(0) gains 2 l alpha zeta(0)
    spec = OperatorSpec.laplacian(2)
    base = zeta_closed_form(spec)
    c = math.exp(-2 * alpha)
    seq = SpectralSequence(spec, 64).scaled(c)
    coeffs = {k: v * c ** ((k - 2) / 2) for k, v in heat_coefficients_for(spec).items()}
    res = zeta_zero_and_det(seq, coeffs)
    assert res.zeta0 == pytest.approx(base.zeta0, abs=1e-10)
    assert res.zeta_prime0 == pytest.approx(base.zeta_prime0 + 2 * alpha * base.zeta0, abs=1e-10)


@pytest.mark.parametrize("alpha", [-0.1, 0.1, 0.5])
def test_scaling_law_fourth_order(alpha):
    spec = OperatorSpec.gjms(4, 4)
    seq = SpectralSequence(spec, 64)
    coeffs, errs = heat_coefficients_for(spec, seq, with_errors=True)
    base = zeta_zero_and_det(seq, coeffs, coeff_err=errs)
    c = math.exp(-4 * alpha)
    scaled = {k: v * c ** ((k - 4) / 4) for k, v in coeffs.items()}
    res = zeta_zero_and_det(seq.scaled(c), scaled)
    assert res.zeta_prime0 == pytest.approx(base.zeta_prime0 + 4 * alpha * base.zeta0, abs=1e-8)


def test_scaling_of_zeta_at_positive_s():
    spec = OperatorSpec.laplacian(2)
    seq = SpectralSequence(spec, 64)
    alpha, s = 0.1, 2.5
    c = math.exp(-2 * alpha)
    assert dirichlet_zeta(seq.scaled(c), s) == pytest.approx(math.exp(2 * alpha * s) * dirichlet_zeta(seq, s),
                                                             rel=1e-12)


@settings(max_examples=8, deadline=None)
@given(st.floats(0.05, 2.0), st.sampled_from([1, 2, 3]))
def test_split_point_independence(t_c, n):
    spec = OperatorSpec.laplacian(n)
    seq = SpectralSequence(spec, 64)
    coeffs = heat_coefficients_for(spec, seq)
    ref = zeta_closed_form(spec)
    res = zeta_zero_and_det(seq, coeffs, t_c=t_c * 0.01)
    assert res.zeta_prime0 == pytest.approx(ref.zeta_prime0, abs=1e-8)


def test_gjms_zeta0_is_conformal_index():
    # zeta(0) of P_4 on S^4 equals a_4 - q with a_4 from the heat fit
    seq, coeffs, res = _mellin(OperatorSpec.gjms(4, 4))
    assert res.zeta0 == pytest.approx(coeffs[4] - seq.q, abs=1e-12)
    assert res.zeta0 == pytest.approx(-38 / 45, abs=1e-6)
