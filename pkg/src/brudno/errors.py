"""Exception and warning types shared across the package."""


class BrudnoError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(BrudnoError, ValueError):
    pass


class ResourceLimitError(BrudnoError):
    """An enumeration or matrix size exceeds a configured cap."""

    def __init__(self, message, cap_name=None, cap=None):
        super().__init__(message)
        self.cap_name = cap_name
        self.cap = cap


class PositivityError(BrudnoError, ValueError):
    """A semi-measure assigned zero mass where strict positivity is required."""


class InvalidStateError(BrudnoError, ValueError):
    pass


class InvalidFamilyError(BrudnoError, ValueError):
    pass


class InvalidSequenceError(BrudnoError, ValueError):
    pass


class DegenerateTypicalityError(BrudnoError):
    """The typical subspace is empty, so no minimal projection exists."""


class DegenerateTypicalityWarning(UserWarning):
    pass


class NearSingularStateWarning(UserWarning):
    pass
