"""Exception hierarchy shared by all pebblex modules."""


class PebblexError(Exception):
    """Base class for library errors."""


class PreconditionError(PebblexError, ValueError):
    """An argument violates a documented precondition."""


class BudgetExceeded(PebblexError):
    """A search or enumeration hit its configured cap before finishing."""


class OracleBudgetError(BudgetExceeded):
    """The brute-force pebbling oracle visited too many states."""


class EnumerationCapError(BudgetExceeded):
    """An exact enumeration would exceed its size cap."""


class AccuracyError(PebblexError, ArithmeticError):
    """A numerical evaluation cannot reach the requested accuracy."""
