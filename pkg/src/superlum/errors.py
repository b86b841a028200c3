"""Exception types shared across the package."""


class SuperlumError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(SuperlumError, ValueError):
    """Raised for invalid or mismatched Hilbert-space dimensions."""


class DomainError(SuperlumError, ValueError):
    """Raised when an input lies outside an operation's domain of validity."""


class ConfigError(SuperlumError, ValueError):
    """Raised for malformed or inconsistent scenario configuration."""


class IntegrationError(SuperlumError, RuntimeError):
    """Raised when a time integration fails a conservation check."""


class PositivityError(IntegrationError):
    """Raised when a density matrix develops a negative eigenvalue below tolerance."""
