"""Exception hierarchy shared by every module of the package."""


class SIndexError(Exception):
    """Base class for all errors raised by this package."""


class UnknownKey(SIndexError, KeyError):
    """An external key does not resolve to a known entity."""

    def __str__(self):
        return Exception.__str__(self)


class CapacityExceeded(SIndexError):
    """Entity or edge count overflows the index integer width."""


class InvalidRecord(SIndexError, ValueError):
    """A record violates a graph invariant (bad year, empty key, ...)."""


class ParseError(SIndexError, ValueError):
    """Malformed line in an input file."""

    def __init__(self, path, line, column, message):
        self.path = str(path)
        self.line = line
        self.column = column
        super().__init__(f"{self.path}:{line}:{column}: {message}")


class LengthMismatch(SIndexError, ValueError):
    pass


class UnboundedWindow(SIndexError, ValueError):
    """A bounded temporal window was required."""


class NonFiniteAccumulation(SIndexError, ArithmeticError):
    """Walk-count accumulation left the finite double range."""


class EmptyGraph(SIndexError, ValueError):
    pass


class EmptyLabels(SIndexError, ValueError):
    pass


class TooFewPapers(SIndexError, ValueError):
    pass
