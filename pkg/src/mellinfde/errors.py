"""Exception and warning types shared across the package."""

from __future__ import annotations


class MellinFdeError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(MellinFdeError, ValueError):
    """Gamma-family function evaluated at a non-positive integer pole."""


class ConvergenceError(MellinFdeError, ArithmeticError):
    """No evaluation scheme could certify the requested tolerance."""


class QuadratureError(MellinFdeError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


class StripViolationError(MellinFdeError, ValueError):
    """Mellin integrand detected non-integrable on the requested line."""


class SymmetryViolationError(MellinFdeError, ArithmeticError):
    """Spectrum expected to be conjugate-symmetric is not."""


class SingularMatrixError(MellinFdeError, ArithmeticError):
    """LU factorization hit an exactly singular system."""


class ResidualError(MellinFdeError, ArithmeticError):
    """Linear solve finished but the backward residual exceeds contract."""


class FitFailureError(MellinFdeError, ValueError):
    """Power-law fit near t=0 is ill-posed (sign changes or zeros)."""


class StepSizeError(MellinFdeError, ValueError):
    """Grünwald-Letnikov leading coefficient vanished or underflowed."""


class ValidationError(MellinFdeError, ValueError):
    """A problem failed validation with at least one error diagnostic."""


class ConfigError(MellinFdeError, ValueError):
    """Run configuration unreadable or violating the schema."""


class IllConditioningWarning(UserWarning):
    """Assembled system's condition estimate exceeds the trust threshold."""
