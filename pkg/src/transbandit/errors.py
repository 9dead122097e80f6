"""Exception types raised across the package."""


class BanditError(Exception):
    """Base class for package errors."""


class StructuralError(BanditError, ValueError):
    """Inputs have inconsistent shapes or violate a structural precondition."""


class DegenerateInstanceError(BanditError, ValueError):
    """Duplicate items, a non-unique best item, or a rank-deficient arm set."""


class InfeasibleDesignError(BanditError, ValueError):
    """Some direction lies outside the span of the arms."""


class BudgetTooSmallError(BanditError, ValueError):
    """Sample budget is smaller than the support of the design."""


class IllegalArmError(BanditError, ValueError):
    """A pull was requested for a vector that is not one of the arms."""


class NonterminatingError(BanditError, RuntimeError):
    """An elimination loop exceeded its phase cap."""
