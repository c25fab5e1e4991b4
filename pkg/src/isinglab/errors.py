"""Exception types shared across the package."""


class IsingLabError(Exception):
    """Base class for all isinglab errors."""


class IndexOutOfRangeError(IsingLabError, IndexError):
    """A site index lies outside [0, n_sites)."""


class SelfCouplingError(IsingLabError, ValueError):
    """A coupling entry pairs a site with itself."""


class DimensionMismatchError(IsingLabError, ValueError):
    """Configuration length does not match the model's site count."""


class TooLargeError(IsingLabError, ValueError):
    """System size exceeds the cap for an exact (enumeration) operation."""

    def __init__(self, n_sites: int, cap: int):
        self.n_sites = n_sites
        self.cap = cap
        super().__init__(f"n_sites={n_sites} exceeds cap {cap} for exact computation")


class InvalidParameterError(IsingLabError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DegreeTooHighError(IsingLabError, ValueError):
    """Polynomial degree exceeds what the operation supports."""


class NotContractingError(IsingLabError, ValueError):
    """Operation requires a positive Dobrushin margin but the model has none."""


class EmptySetError(IsingLabError, ValueError):
    """A configuration set argument is empty."""


class EmptyBatchError(IsingLabError, ValueError):
    """A sample batch argument contains no rows."""


class GridTooDeepError(IsingLabError, ValueError):
    """Tail grid reaches probabilities too small for the batch size."""


class InsufficientPointsError(IsingLabError, ValueError):
    """Too few usable tail points inside the requested fit window."""


class FileFormatError(IsingLabError, ValueError):
    """A serialized artifact does not match its documented schema."""
