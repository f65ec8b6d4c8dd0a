"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RangeError(ValueError):
    """A value is outside its documented range (node index, weight, address)."""


class DuplicateEdgeError(ValueError):
    """The same (i, j) pair appears more than once in an edge list."""


class UnknownGraphError(KeyError):
    """Graph name not present in the best-known-cut registry."""


class InvalidCodeError(ValueError):
    """The reserved 2-bit coupling code 10 was stored or decoded."""


class DecodeError(ValueError):
    """A 32-bit instruction word violates the encoding (reserved bits set)."""


class InsufficientSeedBits(ValueError):
    """The 512-bit seed cannot supply the requested number of 21-bit slices."""
