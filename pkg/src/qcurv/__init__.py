"""Spectral invariants, conformal curvature and sharp functionals on round spheres."""

from .config import RunConfig
from .errors import QcurvError
from .functionals import F0, F123_dim6, F1_dim4, det_quotient
from .heat import fit_heat_coefficients, heat_coefficients_for
from .spectra import OperatorSpec, SpectralSequence, build_sequence
from .zeta import zeta_closed_form, zeta_continued, zeta_zero_and_det

__version__ = "0.1.0"

__all__ = [
    "F0",
    "F123_dim6",
    "F1_dim4",
    "OperatorSpec",
    "QcurvError",
    "RunConfig",
    "SpectralSequence",
    "build_sequence",
    "det_quotient",
    "fit_heat_coefficients",
    "heat_coefficients_for",
    "zeta_closed_form",
    "zeta_continued",
    "zeta_zero_and_det",
]
