import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcurv.conformal import (
    ConformalFactorSpec,
    _j_derivatives,
    boost_log_factor,
    conformal_index_residual,
    conformal_laplacian_fn,
    gauss_residual,
    q4_prescribed,
    q4_two_path_residual,
    scalar_transform,
    schouten_transform,
    yamabe_quotient,
)
from qcurv.errors import ZeroDenominator
from qcurv.harmonic import AxisymField, random_bandlimited, random_ensemble


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@pytest.mark.parametrize("alpha", [0.3, 1.0])
def test_boost_metric_is_round(n, alpha):
    w = boost_log_factor(ConformalFactorSpec(alpha), n, 128)
    J = scalar_transform(w)
    # pointwise values at alpha = 1 are rounding-limited near 5e-8
    assert np.max(np.abs(J.values - n / 2)) < 1e-7
    if n >= 3:
        st_ = schouten_transform(w)
        assert np.max(np.abs(st_.V_tt.values - 0.5)) < 1e-7
        assert np.max(np.abs(st_.V_tan.values - 0.5)) < 1e-7
        assert np.max(np.abs(st_.dJ2.values)) < 1e-10


def test_gauss_residual_for_boost():
    w = boost_log_factor(0.7, 2, 128)
    assert gauss_residual(w, K_w=2.0) < 1e-9
    assert gauss_residual(w) < 1e-9


def test_round_q4_is_gamma_four():
    zero = AxisymField.constant(4, 0.0, 32)
    q = schouten_transform(zero).Q4
    assert np.allclose(q.values, 6.0, atol=1e-14)
    assert np.allclose(q4_prescribed(zero).values, 6.0, atol=1e-14)


def _lap_w_oracle(w, u, n, theta, h=1e-4):
    """-e^{-n w} sin^{1-n} d/dtheta (e^{(n-2) w} sin^{n-1} u') by central differences."""
    def flux(t):
        du = (u(t + h) - u(t - h)) / (2 * h)
        return np.exp((n - 2) * w(t)) * np.sin(t) ** (n - 1) * du
    dflux = (flux(theta + h) - flux(theta - h)) / (2 * h)
    return -np.exp(-n * w(theta)) * np.sin(theta) ** (1 - n) * dflux


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_conformal_laplacian_against_metric_form(n):
    wf = lambda t: 0.3 * np.cos(t) + 0.1 * np.cos(t) ** 2
    uf = lambda t: np.cos(t) ** 3 - 0.5 * np.cos(t)
    w = AxisymField.from_function(n, lambda x: 0.3 * x + 0.1 * x**2, 64)
    u = AxisymField.from_function(n, lambda x: x**3 - 0.5 * x, 64)
    got = conformal_laplacian_fn(w, u)
    theta = np.linspace(0.3, 2.8, 7)
    from qcurv.harmonic import evaluate

    assert np.allclose(evaluate(got, np.cos(theta)), _lap_w_oracle(wf, uf, n, theta), atol=1e-6)


def _q4_with_plus_sign(w):
    # the variant Delta_w u = e^{-2w}(Delta_0 u + (n-2) <dw, du>)
    st_ = schouten_transform(w, 4)
    lap_J, dw_dJ, _ = _j_derivatives(w, 4)
    return 2.0 * st_.J**2 - 2.0 * st_.V2 + (-2.0 * w).exp() * (lap_J + 2.0 * dw_dJ)


def test_q4_two_path_and_sign_contrast():
    for w in random_ensemble(4, 5, seed=11, N=128):
        assert q4_two_path_residual(w) < 1e-8
        wrong = np.max(np.abs(_q4_with_plus_sign(w).values - q4_prescribed(w).values))
        assert wrong > 1e-3


@pytest.mark.parametrize("alpha", [0.2, 0.6, 1.0])
def test_q4_two_path_at_boosts(alpha):
    assert q4_two_path_residual(boost_log_factor(alpha, 4)) < 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_gauss_bonnet_on_random_fields(seed):
    w = random_bandlimited(2, np.random.default_rng(seed), N=128)
    assert conformal_index_residual(w, 2, "K_dim2") < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31))
def test_q4_total_is_conformally_invariant(seed):
    w = random_bandlimited(4, np.random.default_rng(seed), N=128)
    assert conformal_index_residual(w, 4, "Q4_dim4") < 1e-8


def test_index_argument_checks():
    w = AxisymField.constant(4, 0.0, 16)
    with pytest.raises(ValueError):
        conformal_index_residual(w, 4, "K_dim2")
    with pytest.raises(ValueError):
        conformal_index_residual(w, 4, "nope")
    with pytest.raises(ValueError):
        schouten_transform(AxisymField.constant(2, 0.0, 16))


def test_yamabe_quotient_values():
    assert yamabe_quotient(AxisymField.constant(4, 1.0, 32)) == pytest.approx(2.0, abs=1e-14)
    assert yamabe_quotient(AxisymField.constant(6, 1.0, 32)) == pytest.approx(6.0, abs=1e-14)
    assert yamabe_quotient(AxisymField.constant(4, 3.7, 32)) == pytest.approx(2.0, abs=1e-13)
    # conformal image of the constant is also extremal
    for n, target in ((4, 2.0), (6, 6.0)):
        u = ((n - 2) / 2 * boost_log_factor(0.8, n, 128)).exp()
        assert yamabe_quotient(u) == pytest.approx(target, rel=1e-10)
    with pytest.raises(ZeroDenominator):
        yamabe_quotient(AxisymField.constant(4, 0.0, 16))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_yamabe_quotient_sobolev_bound(seed):
    w = random_bandlimited(4, np.random.default_rng(seed), N=64)
    assert yamabe_quotient(w.exp()) >= 2.0 - 1e-12


def test_curvature_state_csv():
    st_ = schouten_transform(AxisymField.constant(4, 0.0, 8))
    rows = st_.to_csv().splitlines()
    assert rows[0] == "cos_theta,J,V_tt,V_tan,dJ2,Q4"
    assert len(rows) == 9
