"""
Module: core.errors
Exception hierarchy shared by the numerical modules. Every class carries the
process exit code the command line maps it to.
"""

from typing import Optional


class ResonanceLabError(Exception):
    exit_code = 1


class ConfigError(ResonanceLabError):
    """Invalid model configuration or command-line input."""
    exit_code = 2


class NumericalError(ResonanceLabError):
    exit_code = 3


class AiryOverflowError(NumericalError):
    """Exponential factor of an Airy value leaves the float range."""


class PoleProximityError(NumericalError):
    """Green's function requested (numerically) at a resonance."""


class NoBoundStateError(NumericalError):
    pass


class LandauPoleError(NumericalError):
    """Flowed coupling left the physical branch."""


class QuadratureError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """
    Newton refinement failure.

    Args:
        message (str): Human readable description.
        reason (str): One of 'no-convergence', 'escaped-basin', 'upper-half-plane',
            'duplicate'.
        index (int, optional): Pole index being refined.
    """

    def __init__(self, message: str, reason: str, index: Optional[int] = None):
        super().__init__(message)
        self.reason = reason
        self.index = index


class MissedPoleError(NumericalError):
    pass


class TruncationError(NumericalError):
    """Overlap window cannot be made wide enough."""


class AccuracyError(NumericalError):
    """Time-domain propagator failed its step-halving check."""


class OutputError(ResonanceLabError):
    exit_code = 4
