"""Error types shared across the library.

The CLI maps these onto exit codes: ConfigError -> 2, numerical failures
(SingularError, PoleError, ConvergenceError) -> 3, IOFormatError -> 4.
"""


class DfwaveError(Exception):
    """Base class for all library errors."""


class ConfigError(DfwaveError):
    """Bad argument, violated precondition, or inconsistent configuration."""


class IOFormatError(DfwaveError):
    """Malformed input file or unwritable output."""


class SingularError(DfwaveError):
    """Singular kernel evaluation or numerically singular linear system.

    Carries the offending condition estimate when one is available.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PoleError(DfwaveError):
    """Rational model denominator vanished at an evaluation point."""


class ConvergenceError(DfwaveError):
    """An iterative routine failed to converge."""
