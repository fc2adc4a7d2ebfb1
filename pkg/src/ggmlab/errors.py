"""Exception and warning types raised by ggmlab."""


class GgmError(Exception):
    """Base class for all ggmlab errors."""


class DimensionError(GgmError, ValueError):
    """Matrix or index set has the wrong shape for the requested operation."""


class InvalidSpectrumError(GgmError, ValueError):
    """A symplectic eigenvalue lies below the vacuum bound of 1/2."""


class PurityError(GgmError, ValueError):
    """A pure-state formula was applied to a state that is not pure."""


class NumericalError(GgmError, ArithmeticError):
    """An eigen-solver failed to converge or produced inconsistent output."""


class TruncationError(GgmError):
    """The requested Fock-space truncation tail could not be reached.

    Attributes:
        achieved: the best tail bound that was reached before giving up.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class EmptyStateError(GgmError):
    """A photon subtraction annihilated every retained Fock component."""


class CapacityError(GgmError, MemoryError):
    """A reduced basis exceeds the configured size cap.

    Attributes:
        basis_size: number of basis vectors that would have been required.
    """

    def __init__(self, message, basis_size=0):
        super().__init__(message)
        self.basis_size = basis_size


class PurityWarning(UserWarning):
    """Covariance matrix is only approximately pure."""


class PrecisionWarning(UserWarning):
    """Truncation tail may limit the precision of a derived quantity."""
