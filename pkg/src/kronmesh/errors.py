"""Exception hierarchy shared across the package.

Every error raised by kronmesh derives from KronmeshError, and each
subclass maps onto one CLI exit code (see cli.py).
"""


class KronmeshError(Exception):
    """Base class for all kronmesh errors."""


class AlphaSpecError(KronmeshError, ValueError):
    """Invalid alpha description: bad grammar, perfect-square D, zero Q, ..."""


class UnsupportedAlphaError(KronmeshError, ValueError):
    """The operation requires an irrational alpha (or more digits than a
    rational expansion provides)."""


class PrecisionUnresolvedError(KronmeshError, ArithmeticError):
    """A certified comparison or enclosure could not be resolved within the
    precision ceiling, or the known digit prefix is too short to certify."""


class OutOfRangeError(KronmeshError, IndexError):
    """An index (digit, convergent, s_m, eta_m) lies beyond the available
    or finite expansion."""
