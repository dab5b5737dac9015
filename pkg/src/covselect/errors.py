"""Exception hierarchy shared across the package."""


class CovselectError(Exception):
    """Base class for all package-specific errors."""


class FormatError(CovselectError):
    """A file's magic bytes, header, or layout do not match its declared format."""


class DataError(CovselectError):
    """Input data violates a documented precondition (non-finite values, ragged rows, ...)."""


class ConfigError(CovselectError):
    """A configuration value is out of range or internally inconsistent."""


class DomainError(CovselectError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class StateError(CovselectError):
    """An operation was applied to state in which it is not legal."""
