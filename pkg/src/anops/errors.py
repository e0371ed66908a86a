"""Exception types shared across the package."""


class InvalidSpec(ValueError):
    """An operator description violates one of its structural invariants."""


class NotApplicable(RuntimeError):
    """An operation was invoked outside its stated precondition."""


class NoConvergence(RuntimeError):
    """The eigensolver did not reach its off-diagonal target within the sweep cap."""


class NotPositiveSemidefinite(ArithmeticError):
    """A matrix square root was requested for an indefinite matrix."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotPositive(RuntimeError):
    """A composite operator failed its positivity check; the certificate is withheld."""

    def __init__(self, message, eigenvalue=None, size=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.size = size


class RankDeficient(RuntimeError):
    """A subspace basis lost a vector during orthonormalization."""


class PredictionMismatch(RuntimeError):
    """Numeric restricted norms disagree with the symbolic prediction (a bug signal)."""
