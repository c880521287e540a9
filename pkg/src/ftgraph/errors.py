"""Exception hierarchy shared by the whole package."""


class FTGraphError(Exception):
    """Base class for every error raised by ftgraph."""


class ArgumentError(FTGraphError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(ArgumentError):
    """Problem size exceeds what an exponential-cost method will enumerate."""


class DegeneracyError(FTGraphError, ArithmeticError):
    """A denominator or normalizer is numerically zero."""


class DegenerateSignalError(DegeneracyError):
    """A signal has zero variance, so its correlation is undefined."""


class IncompleteSpectrumError(FTGraphError, RuntimeError):
    """The root search could not account for every level below ``k_max``.

    ``windows`` lists the ``(k_lo, k_hi, found, expected)`` ranges whose count
    stayed wrong after refinement, ``partial`` is the best spectrum obtained.
    """

    def __init__(self, message, windows=(), partial=None):
        super().__init__(message)
        self.windows = list(windows)
        self.partial = partial
