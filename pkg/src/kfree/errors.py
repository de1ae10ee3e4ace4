"""Exception types raised across the package."""


class KfreeError(Exception):
    """Base class for package errors."""


class DomainError(KfreeError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(KfreeError, MemoryError):
    """The requested range does not fit the configured memory budget."""


class BudgetError(KfreeError):
    """An enumeration would exceed its configured work budget."""

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class PrecisionError(KfreeError, ArithmeticError):
    """A certified error bound could not be brought below the requested tolerance."""

    def __init__(self, message, achieved=None, tol=None):
        super().__init__(message)
        self.achieved = achieved
        self.tol = tol
