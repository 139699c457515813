"""Exception types raised across the package."""


class EcdimError(Exception):
    """Base class for all package errors."""


class DomainError(EcdimError, ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateInputError(EcdimError, ValueError):
    """The inputs make a bound undefined (e.g. zero grounded gap)."""


class ConvergenceError(EcdimError, RuntimeError):
    """A root solve or minimization failed to converge."""


class CapabilityError(EcdimError, RuntimeError):
    """A request exceeds an enumeration or truncation capability."""


class SearchCapExceeded(EcdimError, RuntimeError):
    """No feasible dimension was found below the search cap.

    ``incumbent`` holds the last evaluated index and ``value`` the bound there.
    """

    def __init__(self, message, incumbent=None, value=None, cap=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.value = value
        self.cap = cap
