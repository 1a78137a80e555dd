"""Exception hierarchy used across the package."""


class ShapeboostError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ShapeboostError, ValueError):
    """A hyper-parameter or configuration value is out of range."""


class InvalidInputError(ShapeboostError, ValueError):
    """Input data violates a precondition (shape, length, labels)."""


class InvalidModelError(ShapeboostError, ValueError):
    """A model object is empty or structurally broken."""


class UnsupportedError(ShapeboostError, ValueError):
    """Requested operation is outside the supported problem class."""


class ParseError(InvalidInputError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class InternalError(ShapeboostError, RuntimeError):
    """An internal invariant was breached (solver or descent failure)."""
