"""Exception hierarchy shared across the package."""


class LiePCAError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(LiePCAError, ValueError):
    """An input violates a documented precondition."""


class NotPSDError(PreconditionError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class OffManifoldError(PreconditionError):
    """A point does not lie on the manifold it was paired with."""


class EmptyManifoldError(PreconditionError):
    """The manifold descriptor defines an empty set."""


class OriginPointError(PreconditionError):
    """A sample point is the origin, where the annihilator term is undefined."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"sample point {index} is the origin")


class UnsupportedManifoldError(LiePCAError):
    """The requested quantity is unknown for this kind of manifold."""
