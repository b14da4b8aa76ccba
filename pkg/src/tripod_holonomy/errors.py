"""Exception types shared across the package."""


class TripodError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(TripodError):
    """Matrix fails the Hermiticity pre-check."""


class DimensionMismatch(TripodError):
    """Operands have incompatible dimensions."""


class InvalidDuration(TripodError):
    """Non-positive duration or total time."""


class InvalidOrder(TripodError):
    """Loop order n or revival index k below 1."""


class TimeOutOfRange(TripodError):
    """Sample time outside [0, total loop time]."""


class IndexOutOfRange(TripodError):
    """Arc index outside the loop's arc list."""


class UnsupportedLoop(TripodError):
    """Loop is outside the pole/meridian/equator wedge family."""


class StepCountTooSmall(TripodError):
    """Integrator resolution too low (trace drift above threshold)."""


class TooFewStates(TripodError):
    """Input-state set smaller than the minimum sample size."""


class NoPeakInWindow(TripodError):
    """Peak search bracket contains no interior maximum."""


class UnderdeterminedFit(TripodError):
    """Fewer data points than free fit coefficients plus one."""


class ModelMismatch(TripodError):
    """Fit results passed to a routine expecting different models."""


class ConfigError(TripodError):
    """Invalid or inconsistent run configuration."""
