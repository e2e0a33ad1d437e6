"""Exception hierarchy shared by all linlaw modules."""


class LinlawError(Exception):
    """Base class for every error raised by this package."""

    kind = "internal"


class DomainError(LinlawError, ValueError):
    """Input outside the mathematical domain of an operation."""

    kind = "domain"


class ParseError(LinlawError, ValueError):
    kind = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInputError(ParseError):
    kind = "empty"


class WindowIncompleteError(LinlawError, ValueError):
    """The requested span of candles has at least one missing minute."""

    kind = "window"


class BalancingError(LinlawError, ValueError):
    kind = "balance"


class SplitError(LinlawError, ValueError):
    kind = "split"


class SynthError(LinlawError, RuntimeError):
    kind = "synth"


class FormatError(LinlawError, ValueError):
    """A binary artifact has the wrong magic or a truncated body."""

    kind = "format"
