"""Exception hierarchy shared by all gvpa modules."""


class GvpaError(Exception):
    """Base class for all errors raised by this package."""


class SpecSyntaxError(GvpaError):
    """Malformed concrete syntax. Carries the source position."""

    def __init__(self, message: str, line: int, col: int, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        suffix = ""
        if self.expected:
            suffix = " (expected " + " or ".join(self.expected) + ")"
        super().__init__(f"{line}:{col}: {message}{suffix}")


class SpecValidationError(GvpaError):
    """Well-formedness violation. Carries one entry per offending site."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ResourceLimitError(GvpaError):
    """An exploration or enumeration exceeded its configured cap."""

    def __init__(self, message: str, limit: int, reached: int):
        self.limit = limit
        self.reached = reached
        super().__init__(message)


class FragmentError(GvpaError):
    """A formula lies outside the logic fragment an operation accepts."""


class ContractViolationError(GvpaError):
    """An operation was called outside its stated precondition."""
