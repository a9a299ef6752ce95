"""Exception and warning types raised across the package."""

from __future__ import annotations


class ThermalOpsError(Exception):
    """Base class for all library errors."""


class NotHermitian(ThermalOpsError, ValueError):
    pass


class NotUnitary(ThermalOpsError, ValueError):
    pass


class ConvergenceFailure(ThermalOpsError, RuntimeError):
    pass


class DimensionMismatch(ThermalOpsError, ValueError):
    pass


class DimensionOverflow(ThermalOpsError, ValueError):
    pass


class DomainError(ThermalOpsError, ValueError):
    """A matrix function is undefined somewhere on the (clamped) spectrum."""


class NotDensityMatrix(ThermalOpsError, ValueError):
    pass


class DegenerateSpectrum(ThermalOpsError, ValueError):
    pass


class NotResonant(ThermalOpsError, ValueError):
    pass


class NotEnergyPreserving(ThermalOpsError, ValueError):
    pass


class BetaZero(ThermalOpsError, ValueError):
    """Temperature-weighted quantities are undefined at beta = 0."""


class SupportViolation(ThermalOpsError, ArithmeticError):
    """A relative entropy needed by an identity is infinite."""


class ConfigError(ThermalOpsError, ValueError):
    pass


class UnknownParameter(ConfigError):
    pass


class ConventionMismatch(UserWarning):
    """Coherence identities fail under the rank-one dephasing convention."""
