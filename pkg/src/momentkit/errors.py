"""Exception types shared across the package."""


class MomentkitError(Exception):
    """Base class for all package-specific errors."""


class NotPrime(MomentkitError):
    pass


class CapExceeded(MomentkitError):
    pass


class ZeroInverse(MomentkitError):
    pass


class CtxMismatch(MomentkitError):
    pass


class ZeroArgument(MomentkitError):
    pass


class EvenCharacteristic(MomentkitError):
    pass


class FilterRequiresQuadExt(MomentkitError):
    pass


class ShapeMismatch(MomentkitError):
    pass


class NotRegular(MomentkitError):
    pass


class NotTrivialOnBase(MomentkitError):
    pass


class PoleHit(MomentkitError):
    pass


class UnsupportedChar(MomentkitError):
    pass


class UnsupportedConductor(MomentkitError):
    pass


class UnsupportedField(MomentkitError):
    pass


class UnsupportedCase(MomentkitError):
    pass


class BadSubset(MomentkitError):
    pass


class SingularMatrix(MomentkitError):
    pass


class InsufficientPrecision(MomentkitError):
    pass


class PrecisionLoss(MomentkitError):
    pass


class DivisionByZeroExpr(MomentkitError):
    pass


class EssentialSingularity(MomentkitError):
    pass


class InsufficientOrder(MomentkitError):
    pass


class PoleAtOne(MomentkitError):
    pass


class MissingArchStub(MomentkitError):
    pass


class UsageError(MomentkitError):
    pass


class InvariantViolation(MomentkitError):
    pass
