"""Exception types raised across the package."""


class UpcrossError(Exception):
    """Base class for every error raised by :mod:`upcross`."""


class BoundViolation(UpcrossError, ValueError):
    pass


class BadGap(UpcrossError, ValueError):
    pass


class EmptySequence(UpcrossError, ValueError):
    pass


class IndexOutOfRange(UpcrossError, IndexError):
    pass


class TooLarge(UpcrossError, ValueError):
    pass


class TooDeep(UpcrossError, ValueError):
    pass


class WindowTooShort(UpcrossError, ValueError):
    pass


class WindowTooLong(UpcrossError, ValueError):
    pass


class PreconditionViolated(UpcrossError, ValueError):
    pass


class BadThresholds(UpcrossError, ValueError):
    pass


class BadParameter(UpcrossError, ValueError):
    pass


class BadWeights(UpcrossError, ValueError):
    pass


class NoUniqueStationary(UpcrossError, ValueError):
    pass


class PrefixTooShort(UpcrossError, ValueError):
    pass


class ParseError(UpcrossError, ValueError):
    """Malformed input file. ``line`` is 1-based, or None when not line-oriented."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
