"""Exception types shared across the package."""


class GlapError(Exception):
    """Base class for all package-specific errors."""


class GraphInputError(GlapError):
    """Invalid graph data: bad endpoints, self-loops, malformed files, or a
    grounded set that is empty / not a proper subset."""


class CapExceededError(GlapError):
    """An exact enumeration was requested above its configured size cap."""


class ConvergenceError(GlapError):
    """An iterative solver did not reach the residual tolerance.

    Carries the best residual seen so the caller can decide whether the
    partial answer is usable.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class NotPositiveDefiniteError(GlapError):
    """The matrix handed to an SPD solver is not positive definite, which for
    a grounded Laplacian means the underlying graph is disconnected."""


class StabilityError(GlapError):
    """A fixed-step integration diverged; the message names the admissible
    step-size bound."""


class RejectionBudgetError(GlapError):
    """Rejection sampling exhausted its attempt budget."""
