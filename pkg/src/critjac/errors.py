"""Exception hierarchy shared by all critjac modules."""


class CritjacError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CritjacError, ValueError):
    """Parameters lie outside the region where a formula applies."""


class SingularConjugator(CritjacError, ArithmeticError):
    """A conjugating 2x2 matrix is singular at the requested index."""


class DegenerateAnchor(CritjacError, ValueError):
    """Both anchor values of a solution are zero."""


class OutOfRange(CritjacError, IndexError):
    """Requested index lies outside a computed trace."""


class InsufficientData(CritjacError, ValueError):
    """Too few samples in a fit window."""


class NotStabilized(CritjacError):
    """Fewer eigenvalues stabilized across truncation sizes than requested."""


class InsufficientStabilization(CritjacError):
    """A check needs eigenvalues beyond the stabilized prefix."""


class BoundViolation(CritjacError):
    """An eigenvalue bound failed; carries the offending index and side."""

    def __init__(self, index, side, value, bound):
        self.index = index
        self.side = side
        self.value = value
        self.bound = bound
        super().__init__(f"E_{index} = {value!r} violates {side} bound {bound!r}")


class SupportViolation(CritjacError, ValueError):
    """A trial vector touches sites excluded by its subspace."""


class WindowTooSmall(CritjacError, ValueError):
    """Subinterval width of the block test-function window is below 2."""
