"""Exception hierarchy shared by the library and the command line."""
from typing import Optional

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PRECISION = 2
EXIT_PROPERTY = 3


class KpWindowError(Exception):
    """Base class for every error raised by kpwindow."""


class ValidationError(KpWindowError):
    """Invalid input: a malformed document, a bad window or a violated precondition."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        self.message = message
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class NotInvertibleError(ValidationError):
    """Zero divisors, non-units and operators that are not of monic-unit form."""


class ZeroDivisorError(KpWindowError, ZeroDivisionError):
    """Exact division by zero."""


class PrecisionError(KpWindowError):
    """The working window (or KP depth) is too small to determine the result."""


class IndeterminateError(KpWindowError):
    """A question that the available window cannot decide."""


class PropertyCheckError(KpWindowError):
    """An identity that must hold exactly was found to fail."""


def nested(exc: ValidationError, prefix: str) -> ValidationError:
    """The same error with its field path placed under ``prefix``."""
    path = f"{prefix}.{exc.path}" if exc.path else prefix
    return type(exc)(exc.message, path)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, PropertyCheckError):
        return EXIT_PROPERTY
    if isinstance(exc, (PrecisionError, IndeterminateError)):
        return EXIT_PRECISION
    return EXIT_VALIDATION
