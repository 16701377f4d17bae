"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3.
"""


class QoctError(Exception):
    """Base class for package errors."""


class ConfigError(QoctError, ValueError):
    """Invalid user input: spectra, stacks, grids or scenario files."""


class NumericalError(QoctError, ArithmeticError):
    """A computation cannot produce a meaningful result (e.g. a dark sample)."""
