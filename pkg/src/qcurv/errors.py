"""Exception and warning types raised across the package."""


class QcurvError(Exception):
    """Base class for all package errors."""


class GammaPole(QcurvError, ValueError):
    """A Gamma-function ratio was evaluated at an uncancelled pole."""


class InvalidSpec(QcurvError, ValueError):
    """An operator specification violates its invariants."""


class TailBudgetExceeded(QcurvError):
    """The certified truncation tail cannot be brought under the budget."""


class PoleHit(QcurvError, ValueError):
    """The zeta function was requested at one of its poles."""


class QuadratureFailure(QcurvError):
    """Adaptive quadrature did not reach the requested tolerance."""


class IllConditioned(QcurvError):
    """A least-squares system exceeded the configured condition-number cap."""


class TraceMismatch(QcurvError):
    """tr(V) disagreed with J beyond tolerance (signals a convention bug)."""


class ZeroDenominator(QcurvError, ZeroDivisionError):
    """A quotient had a vanishing (or numerically vanishing) denominator."""


class UnsupportedPair(QcurvError, KeyError):
    """No coupling row exists for the requested (operator, dimension)."""


class AliasingWarning(UserWarning):
    """Trailing spectral coefficients carry non-negligible energy."""
