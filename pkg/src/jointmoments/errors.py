"""Exception hierarchy shared by every module.

The command-line front end maps these onto exit codes, so library code
raises the most specific class that applies.
"""

from __future__ import annotations


class JointMomentsError(Exception):
    """Base class for all package errors."""


class DomainError(JointMomentsError, ValueError):
    """A parameter lies outside the region where a formula is defined."""


class PoleError(DomainError):
    """A Gamma-type function was evaluated at (or numerically on) a pole."""


class QuadratureError(JointMomentsError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    estimate : complex or float, optional
        The value obtained before giving up.
    error : float, optional
        The achieved a-posteriori error estimate.
    """

    def __init__(self, message: str, estimate=None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DegenerateConfigurationError(DomainError):
    """A point configuration has coinciding coordinates where strict order is required."""


class ConvergenceWarning(RuntimeWarning):
    """Emitted when sampler diagnostics exceed their thresholds."""


class EffectiveSampleSizeWarning(RuntimeWarning):
    """Emitted when importance weights degenerate."""
