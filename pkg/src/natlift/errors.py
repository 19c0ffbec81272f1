"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class NatLiftError(Exception):
    """Base class for all errors raised by natlift."""


class DomainError(NatLiftError, ValueError):
    """A point lies outside the domain where an object is defined."""

    def __init__(self, message: str, value=None, floor=None):
        super().__init__(message)
        self.value = value
        self.floor = floor


class CoeffConstructionError(NatLiftError, ValueError):
    """A coefficient expression uses an unsupported form."""


class DegenerateMetricError(NatLiftError, ValueError):
    """A positivity condition of the lifted metric fails."""

    def __init__(self, message: str, inequality: str | None = None, t: float | None = None):
        super().__init__(message)
        self.inequality = inequality
        self.t = t


class SingularityError(NatLiftError, ArithmeticError):
    """A denominator or matrix needed for an inverse is (numerically) singular."""


class PlaneError(NatLiftError, ValueError):
    """Two vectors do not span a non-degenerate 2-plane."""


class DecompositionError(NatLiftError, ValueError):
    """A tensor cannot be decomposed in the requested basis."""


class OracleError(NatLiftError, ArithmeticError):
    """The finite-difference oracle met a singular metric."""


class ConfigError(NatLiftError, ValueError):
    """A run configuration is malformed."""
