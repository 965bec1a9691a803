"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Vector or matrix shapes do not match the phase space."""


class InvariantError(ValueError):
    """A structural invariant (symplectic, complex structure, positivity) failed.

    ``check`` names the failing invariant so callers can report it.
    """

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class ConvergenceError(RuntimeError):
    """A truncation or iterative procedure did not reach its tolerance."""
