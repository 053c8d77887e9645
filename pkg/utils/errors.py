"""
Exception hierarchy and CLI exit codes.
"""


class EllbandError(ValueError):
    """Base class for every error raised by the band machinery."""

    exit_code = 1


class ConfigError(EllbandError):
    """Invalid or mutually exclusive configuration."""

    exit_code = 2


class DomainError(EllbandError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 2


class InvalidBandError(EllbandError):
    """Band endpoints violate ordering (h_i >= g_i or non-increasing bounds)."""


class SymmetryError(EllbandError):
    """Band is not ELL-symmetric (g_i != 1 - h_{n+1-i})."""


class SizeError(EllbandError):
    """Problem size exceeds a combinatorial guard."""


class NonConvergenceError(EllbandError):
    """An iterative solver hit its iteration cap."""


class UnsupportedCombinationError(EllbandError):
    """No table, exact solve or calibrated approximation covers (alpha, n)."""

    exit_code = 3


class TableError(EllbandError):
    """Empty, malformed or out-of-range eta table."""


class DegenerateSampleError(EllbandError):
    """Sample has a zero scale estimate."""


class SupportError(EllbandError):
    """Data outside the support of the reference family."""


class ConsistencyError(EllbandError):
    """Observations and band disagree in size."""


class DataReadError(EllbandError):
    """Input data file missing or unparseable."""

    exit_code = 4


class TransformDomainError(EllbandError):
    """Axis transform requested on values outside its domain."""

    exit_code = 5

    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value
