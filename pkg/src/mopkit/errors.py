"""Exception types raised across the package."""


class MopkitError(Exception):
    """Base class for library errors."""


class DegreeError(MopkitError, ValueError):
    """A polynomial does not have the degree an operation requires."""


class TruncationError(MopkitError):
    """Not enough moments are stored to evaluate a requested quantity."""


class SingularMinor(MopkitError):
    """A leading principal minor of the block Hankel matrix vanished.

    ``order`` is the 1-based scalar order of the failing minor, so order 1
    means the (0, 0) entry of ``U_0``.
    """

    def __init__(self, order: int, pivot: float):
        super().__init__(f"singular leading principal minor at order {order} (pivot {pivot:.3e})")
        self.order = order
        self.pivot = pivot


class SingularCoefficient(MopkitError):
    """A recurrence coefficient that must be inverted is singular."""


class ConvergenceError(MopkitError):
    """The QR iteration did not converge; ``partial`` holds eigenvalues found so far."""

    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


class QuadratureError(MopkitError):
    """The weight formula broke down, e.g. a multiplicity inconsistent with det V_m."""


class EvaluationError(MopkitError, ValueError):
    """A function was evaluated at a forbidden point (pole, support image, z = 0)."""


class MissingCoefficient(MopkitError, ValueError):
    """A scalar recurrence coefficient needed for a block entry is absent."""


class InputError(MopkitError, ValueError):
    """A user-supplied file or argument is malformed."""
