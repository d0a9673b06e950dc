"""Exception types raised across the package."""


class StackfitError(Exception):
    pass


class TraceFormatError(StackfitError, ValueError):
    """A trace or sample file does not match its declared format.

    ``position`` is a byte offset for binary input and a 1-based line
    number for text input.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position


class DegenerateFitError(StackfitError, ValueError):
    """Moments do not admit a fit for the requested family."""


class LineSizeMismatch(StackfitError, ValueError):
    pass
