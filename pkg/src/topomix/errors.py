"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); numeric
and internal-contract failures derive from :class:`NumericError` (exit 3).
"""


class TopomixError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TopomixError, ValueError):
    pass


class InvalidParameterError(InputError):
    pass


class InvalidInputError(InputError):
    pass


class DegenerateSampleError(InputError):
    pass


class DomainCoverageError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(TopomixError, ArithmeticError):
    pass


class ContractError(NumericError):
    """An internal post-condition did not hold."""
