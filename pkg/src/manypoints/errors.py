"""Exception hierarchy shared across the package."""


class ManyPointsError(Exception):
    """Base class for all package-specific errors."""


class NotPrime(ManyPointsError):
    pass


class CapExceeded(ManyPointsError):
    pass


class DivisionByZero(ManyPointsError):
    pass


class ContextMismatch(ManyPointsError):
    pass


class EvenCharacteristic(ManyPointsError):
    pass


class OddCharacteristic(ManyPointsError):
    pass


class WrongCharacteristic(ManyPointsError):
    pass


class NotASquare(ManyPointsError):
    pass


class NotSquarefree(ManyPointsError):
    pass


class DegreeTooSmall(ManyPointsError):
    pass


class DegenerateFunction(ManyPointsError):
    pass


class MalformedRecord(ManyPointsError):
    pass


class SingularCurve(ManyPointsError):
    pass


class NoAdmissibleT(ManyPointsError):
    pass


class SearchExhausted(ManyPointsError):
    pass


class TooManyWeierstrass(ManyPointsError):
    pass


class CoordinateFailure(ManyPointsError):
    pass


class PreconditionCount(ManyPointsError):
    pass


class DivisionByZeroPoly(ManyPointsError):
    pass


class UnsupportedN(ManyPointsError):
    pass


class EvenQForS8(ManyPointsError):
    pass


class BudgetExceeded(ManyPointsError):
    pass


class NonIntegerResult(ManyPointsError):
    pass


class IntegralityViolation(ManyPointsError):
    pass


class GTooLarge(ManyPointsError):
    pass
