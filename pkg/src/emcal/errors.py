"""Exception hierarchy shared across the toolkit.

CLI exit-code mapping: `InputError` and subclasses exit 2,
`AlignmentError` exits 3.
"""


class EmcalError(Exception):
    """Base class for all toolkit errors."""


class InputError(EmcalError):
    """Bad input: malformed files, out-of-domain values, empty data."""


class ParseError(InputError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(InputError):
    """A value outside its documented domain (score, label, threshold, T, ...)."""


class EmptyInputError(InputError):
    """An operation that requires at least one record got none."""


class InsufficientDataError(InputError):
    """Fewer data points than the operation's stated minimum."""


class AlignmentError(EmcalError):
    """Positionally paired inputs disagree in length, labels, or arity."""
