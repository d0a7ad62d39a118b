"""Exception types shared across the library."""


class Error(Exception):
    """Base class for all library errors."""


class NotUnitError(Error):
    """Input biquaternion is not within tolerance of unit norm."""


class ParseError(Error):
    """A triple file line could not be parsed."""

    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class ShapeMismatchError(Error):
    """Operands have incompatible embedding shapes."""


class NonFiniteError(Error):
    """A loss value, gradient, or parameter became NaN or infinite."""


class CorruptHeaderError(Error):
    """Checkpoint file is truncated or its header is unreadable."""


class FormatVersionError(Error):
    """Checkpoint header disagrees with the payload or is an unknown version."""
