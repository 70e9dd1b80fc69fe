"""Exception types shared across the package."""


class ActinwireError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(ActinwireError, ValueError):
    """A physical or numerical parameter is outside its valid domain."""


class ModelDomainError(ActinwireError, ValueError):
    """The model is not defined for the given inputs (e.g. an underdamped circuit)."""


class UnsupportedCombinationError(ActinwireError, ValueError):
    """Two options were requested together that have no defined meaning."""


class ConfigError(ActinwireError, ValueError):
    """Malformed configuration file or override."""
