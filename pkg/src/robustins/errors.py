"""Exception hierarchy shared by every module."""


class ModelError(Exception):
    """Base class for all errors raised by robustins."""


class DomainError(ModelError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class AdmissibilityError(ModelError, ValueError):
    """Parameters violate a construction invariant."""


class DegenerateProfitabilityError(DomainError):
    """The profitability ratio is zero where its reciprocal is required."""


class ClassificationError(ModelError):
    """No regime condition matched; carries the evaluated condition values."""

    def __init__(self, message, conditions=None):
        super().__init__(message)
        self.conditions = dict(conditions or {})


class OracleCoverageError(ModelError):
    """The brute-force grid failed to contain the analytic optimum."""


class ConfigError(ModelError, ValueError):
    """A scenario file is malformed or fails validation."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class PreconditionError(DomainError):
    """An operation was called in a regime it does not cover."""
