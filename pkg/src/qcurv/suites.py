"""Named invariant suites addressable from ``qcurv verify``.

Every suite returns a list of :class:`Check` rows.  A suite passes when
all of its checks pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .conformal import (
    boost_log_factor,
    conformal_index_residual,
    gauss_residual,
    q4_two_path_residual,
    yamabe_quotient,
)
from .functionals import (
    F0,
    F123_dim6,
    F1_dim4,
    F2_BASE,
    F3_BASE,
    LOWER_THRESHOLD,
    UPPER_THRESHOLD,
    LeadingForm,
    beckner_ratio,
    beckner_trial,
    classify_leading_form,
    det_quotient,
    gram_matrix,
    intertwinor_apply,
    volume_normalized,
)
from .harmonic import AxisymField, random_bandlimited, random_ensemble
from .heat import (
    a6_conformal_laplacian,
    fit_heat_coefficients,
    heat_coefficients_for,
    known_heat_coefficients,
    round_curvature,
)
from .spectra import OperatorSpec, SpectralSequence
from .zeta import zeta_closed_form, zeta_zero_and_det

BOOSTS = (0.2, 0.5, 1.0)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: value={self.value:.6g} bound={self.bound:.3g} {self.detail}".rstrip()


def _below(name, value, bound, detail=""):
    value = float(value)
    return Check(name, bool(abs(value) < bound), value, bound, detail)


def _at_least(name, value, floor, detail=""):
    value = float(value)
    return Check(name, bool(value >= floor), value, floor, detail)


def mellin_zeta0(spec, j_max=64, cache=None):
    """Heat fit followed by the Mellin split at s = 0."""
    seq = SpectralSequence(spec, j_max)
    coeffs, errs = heat_coefficients_for(spec, seq, with_errors=True, cache=cache)
    return seq, coeffs, zeta_zero_and_det(seq, coeffs, coeff_err=errs)


# ------------------------------------------------------------------ suites


def suite_s1_det(cfg):
    t0 = time.perf_counter()
    _, _, res = mellin_zeta0(OperatorSpec.laplacian(1))
    elapsed = time.perf_counter() - t0
    return [
        _below("det Laplacian on S^1 - (2 pi)^2", res.det - (2 * math.pi) ** 2, 1e-6,
               f"method={res.method.value}"),
        Check("S^1 det runtime [s]", elapsed < 5.0, elapsed, 5.0),
    ]


def zeta0_targets():
    """(label, spec, target zeta(0)) for the zeta(0) identities."""
    a6 = a6_conformal_laplacian(6, round_curvature(6))
    return [
        ("S^1 Laplacian", OperatorSpec.laplacian(1), -1.0),
        ("S^2 Laplacian", OperatorSpec.laplacian(2), -2 / 3),
        ("S^2 Dirac^2", OperatorSpec.dirac_squared(2), -1 / 3),
        ("S^6 Y", OperatorSpec.conformal_laplacian(6), a6),
    ]


def suite_zeta0(cfg):
    out = []
    for label, spec, target in zeta0_targets():
        seq, _, res = mellin_zeta0(spec)
        out.append(_below(f"zeta(0) {label}", res.zeta0 - target, 1e-5))
        # a_n from a fit with nothing pinned
        a_n = dict(fit_heat_coefficients(seq, spec.n, 1, spec.n + 2).coeffs)[spec.n]
        out.append(_below(f"zeta(0) = a_n - q {label}", res.zeta0 - (a_n - seq.q), 1e-5))
        out.append(_below(f"Hurwitz zeta(0) {label}", zeta_closed_form(spec).zeta0 - target, 1e-5))
    return out


def suite_heat_fit(cfg):
    seq = SpectralSequence(OperatorSpec.laplacian(2), 64)
    fit = dict(fit_heat_coefficients(seq, 2, 1, 5, t_window=cfg.fit_window).coeffs)
    known = known_heat_coefficients(OperatorSpec.laplacian(2))
    out = []
    for k, target in ((0, 1.0), (2, 1 / 3), (4, 1 / 15)):
        out.append(_below(f"S^2 a_{k} relative error", (fit[k] - target) / target, 1e-3))
        out.append(_below(f"S^2 closed-form a_{k}", known[k] - target, 1e-15))
    for k in (1, 3, 5):
        out.append(_below(f"S^2 odd a_{k}", fit[k], 1e-6))
    return out


def suite_a6(cfg):
    out = []
    for form in (1, 2):
        v8 = a6_conformal_laplacian(8, round_curvature(8), form=form)
        out.append(Check(f"a_6[Y] at n=8 (form {form}) is exactly 0", v8 == 0.0, v8, 0.0))
    spec = OperatorSpec.conformal_laplacian(6)
    fit = dict(fit_heat_coefficients(SpectralSequence(spec, 64), 6, 1, 8).coeffs)
    closed = a6_conformal_laplacian(6, round_curvature(6))
    out.append(_below("a_6[Y] S^6 fit vs closed form (relative)", (fit[6] - closed) / closed, 5e-3))
    _, _, res = mellin_zeta0(spec)
    out.append(_below("zeta(0) of Y on S^6 vs a_6[Y]", res.zeta0 - closed, 1e-5))
    return out


def suite_mt_equality(cfg):
    t0 = time.perf_counter()
    out = []
    for n in (2, 4, 6):
        worst = max(abs(F0(boost_log_factor(a, n, cfg.N))) for a in BOOSTS)
        out.append(_below(f"|F0| at boosts, S^{n}", worst, 1e-6))
        ens = random_ensemble(n, 100, seed=cfg.seed, N=cfg.N)
        out.append(_at_least(f"min F0 on 100 random fields, S^{n}", min(F0(w) for w in ens), -1e-9))
    elapsed = time.perf_counter() - t0
    out.append(Check("F0 suite runtime [s]", elapsed < 60.0, elapsed, 60.0))
    return out


def suite_q4_two_path(cfg):
    boosts = [boost_log_factor(a, 4, cfg.N) for a in BOOSTS]
    ens = random_ensemble(4, 20, seed=cfg.seed, N=cfg.N)
    return [
        _below("Q4 two-path residual at boosts", max(q4_two_path_residual(w) for w in boosts), 1e-6),
        _below("Q4 two-path residual, 20 random fields", max(q4_two_path_residual(w) for w in ens), 1e-6),
    ]


def suite_conformal_index(cfg):
    out = []
    s2 = [boost_log_factor(a, 2, cfg.N) for a in BOOSTS] + random_ensemble(2, 20, seed=cfg.seed, N=cfg.N)
    out.append(_below("|int K dv - 8 pi| on S^2",
                      max(conformal_index_residual(w, 2, "K_dim2") for w in s2), 1e-8))
    out.append(_below("Gauss equation residual on S^2", max(gauss_residual(w) for w in s2), 1e-8))
    s4 = [boost_log_factor(a, 4, cfg.N) for a in BOOSTS] + random_ensemble(4, 20, seed=cfg.seed, N=cfg.N)
    out.append(_below("|int Q4 dv - int (Q4 dv)_0| on S^4",
                      max(conformal_index_residual(w, 4, "Q4_dim4") for w in s4), 1e-6))
    return out


def suite_dim6(cfg):
    zero = AxisymField.constant(6, 0.0, cfg.N)
    f1, f2, f3 = F123_dim6(zero)
    out = [
        Check("F2 base constant is 54", F2_BASE == 54.0, F2_BASE, 54.0),
        Check("F3 base constant is 108", F3_BASE == 108.0, F3_BASE, 108.0),
        _below("F1, F2, F3 at omega = 0", max(abs(f1), abs(f2), abs(f3)), 1e-9),
    ]
    worst = max(max(abs(v) for v in F123_dim6(boost_log_factor(a, 6, cfg.N))) for a in BOOSTS)
    out.append(_below("F1, F2, F3 at boosts", worst, 1e-6))
    vals = np.array([F123_dim6(w) for w in random_ensemble(6, cfg.ensemble_size, seed=cfg.seed, N=cfg.N)])
    for i in range(3):
        out.append(_at_least(f"min F{i + 1} on the random ensemble", vals[:, i].min(), -1e-9))
    out.append(_at_least("min F1 (dim 4) on the random ensemble",
                         min(F1_dim4(w) for w in random_ensemble(4, cfg.ensemble_size, seed=cfg.seed, N=cfg.N)),
                         -1e-9))
    y4 = yamabe_quotient(AxisymField.constant(4, 1.0, cfg.N))
    y6 = yamabe_quotient(AxisymField.constant(6, 1.0, cfg.N))
    out.append(_below("Yamabe quotient S^4, f = 1, minus 2", y4 - 2.0, 1e-14))
    out.append(_below("Yamabe quotient S^6, u = 1, minus 6", y6 - 6.0, 1e-14))
    return out


# sign demanded of det_quotient over the ensemble: +1 means >= 0 (max at round)
CHECKERBOARD = {
    (2, "Y"): 1, (2, "DiracSq"): -1,
    (4, "Y"): -1, (4, "DiracSq"): 1,
    (6, "Y"): 1, (6, "DiracSq"): -1,
}


def leading_form_ratios(degrees=(2, 3, 4, 6, 10, 20), eps=1e-4, N=128):
    """-q0_j / q1_j from second differences of F0 and F1 along zonal modes.

    F0 + a F1 changes sign on mode j at a = -q0_j / q1_j, so the extreme
    ratios over j are the thresholds of the leading quadratic form.
    """
    out = {}
    for j in degrees:
        phi = AxisymField.zonal(4, j, N)
        q0 = (F0(eps * phi) + F0(-eps * phi)) / (2 * eps**2)
        q1 = (F1_dim4(eps * phi) + F1_dim4(-eps * phi)) / (2 * eps**2)
        out[j] = -q0 / q1
    return out


def suite_checkerboard(cfg):
    out = []
    for (dim, tag), sign in CHECKERBOARD.items():
        ens = random_ensemble(dim, cfg.ensemble_size, seed=cfg.seed, N=cfg.N)
        if dim == 2:
            ens = [volume_normalized(w) for w in ens]
        vals = np.array([det_quotient(tag, dim, w) for w in ens])
        worst = float((sign * vals).min())
        out.append(_at_least(f"sign {'+' if sign > 0 else '-'} of det quotient {tag}, dim {dim}",
                             worst, -1e-9))
        boost = max(abs(det_quotient(tag, dim, boost_log_factor(a, dim, cfg.N))) for a in BOOSTS)
        if dim == 2:
            boost = max(abs(det_quotient(tag, 2, volume_normalized(boost_log_factor(a, 2, cfg.N))))
                        for a in BOOSTS)
        out.append(_below(f"det quotient {tag}, dim {dim}, at boosts", boost, 1e-6))
    grid = np.union1d(np.linspace(-1.0, 0.0, 241), [LOWER_THRESHOLD, UPPER_THRESHOLD])
    labels = [classify_leading_form(a) for a in grid]
    pd = grid[[lab is LeadingForm.POSITIVE_DEFINITE for lab in labels]]
    nd = grid[[lab is LeadingForm.NEGATIVE_DEFINITE for lab in labels]]
    out.append(_below("leading form: largest positive-definite a vs -8/15", pd.max() - LOWER_THRESHOLD, 1e-12))
    out.append(_below("leading form: smallest negative-definite a vs -1/3", nd.min() - UPPER_THRESHOLD, 1e-12))
    ratios = leading_form_ratios()
    out.append(_below("second-variation ratio at j=2 vs -8/15", ratios[2] - LOWER_THRESHOLD, 1e-6))
    inside = all(LOWER_THRESHOLD - 1e-6 <= r < UPPER_THRESHOLD for r in ratios.values())
    out.append(Check("second-variation ratios lie in [-8/15, -1/3)", inside, max(ratios.values()),
                     UPPER_THRESHOLD))
    return out


def suite_rep_theory(cfg):
    out = []
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for n, nu in ((2, 0.7), (4, -0.5), (4, 1.3), (6, -1.0), (6, 2.5)):
        g = random_bandlimited(n, rng, degree=99, N=cfg.N)
        h = intertwinor_apply(intertwinor_apply(g, nu), -nu)
        worst = max(worst, float(np.max(np.abs(h.coeffs[:100] - g.coeffs[:100]))) / float(np.max(np.abs(g.coeffs))))
    out.append(_below("A_{2nu} A_{-2nu} - I on the first 100 modes", worst, 1e-12))
    gmin = math.inf
    for n in (2, 4, 6):
        for frac in (-0.95, -0.6, -0.2, 0.2, 0.6, 0.95):
            gmin = min(gmin, float(np.linalg.eigvalsh(gram_matrix(n, frac * n / 2)).min()))
    out.append(_at_least("min Gram eigenvalue for |nu| < n/2", gmin, 1e-300))
    for n, nu in ((4, -0.5), (4, -1.0), (6, -1.0)):
        trial = beckner_trial(n, nu, 0.5, cfg.N)
        best = beckner_ratio(trial, trial, nu)
        ens = random_ensemble(n, 50, seed=cfg.seed, N=cfg.N)
        rival = max(max(beckner_ratio(w.exp(), w.exp(), nu), beckner_ratio(w.exp(), (0.5 * w).exp(), nu))
                    for w in ens)
        out.append(Check(f"Beckner trial dominates 50 random trials (n={n}, nu={nu})",
                         bool(best >= rival), best, rival, f"margin={best - rival:.3g}"))
    return out


SUITES = {
    "s1-det": suite_s1_det,
    "zeta0": suite_zeta0,
    "heat-fit": suite_heat_fit,
    "a6": suite_a6,
    "mt-equality": suite_mt_equality,
    "q4-two-path": suite_q4_two_path,
    "conformal-index": suite_conformal_index,
    "dim6": suite_dim6,
    "checkerboard": suite_checkerboard,
    "rep-theory": suite_rep_theory,
}


def run_suite(name, cfg=None):
    cfg = cfg or RunConfig()
    if name == "all":
        return [c for fn in SUITES.values() for c in fn(cfg)]
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}") from None
    return fn(cfg)


__all__ = ["BOOSTS", "CHECKERBOARD", "Check", "SUITES", "leading_form_ratios", "mellin_zeta0", "run_suite"]
