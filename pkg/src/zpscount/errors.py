class ZpsCountError(Exception):
    """Base class for errors raised by zpscount."""


class BudgetExceeded(ZpsCountError):
    def __init__(self, size, budget, what="matrices"):
        self.size = size
        self.budget = budget
        super().__init__(f"enumeration of {size} {what} exceeds budget {budget}")


class NotSquare(ZpsCountError, ValueError):
    pass


class ShapeUnsupported(ZpsCountError, ValueError):
    pass


class RangeUnsupported(ZpsCountError, ValueError):
    pass


class IndexOutOfRange(ZpsCountError, IndexError):
    pass


class IntegralityViolation(ZpsCountError, ArithmeticError):
    pass


class DuplicatePrime(ZpsCountError, ValueError):
    pass
