"""Exception hierarchy shared across the package."""


class P1nError(Exception):
    """Base class for all errors raised by p1n."""


class ShapeError(P1nError, ValueError):
    """Operands have incompatible dimensions or the wrong arity."""


class ContractError(P1nError, ValueError):
    """An input violates a documented precondition (Hermiticity, commutation, ...)."""


class ConstructionError(P1nError):
    """A matrix set failed the algebra it is supposed to realize."""


class ClassificationError(P1nError):
    """A spectrum could not be matched to half-integer labels."""


class DomainError(P1nError, ValueError):
    """A state or parameter lies outside the region where an operator is defined."""


class ResourceError(P1nError):
    """A request exceeds a size cap."""
