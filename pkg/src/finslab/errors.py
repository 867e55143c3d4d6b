"""Exception hierarchy shared by every module."""


class FinslerError(Exception):
    """Base class for all library errors."""


class ZeroVector(FinslerError, ValueError):
    pass


class OutsideDomain(FinslerError, ValueError):
    pass


class OutsideBall(OutsideDomain):
    pass


class AtOrigin(FinslerError, ValueError):
    pass


class LeftDomain(FinslerError, RuntimeError):
    pass


class NoConvergence(FinslerError, RuntimeError):
    pass


class DegenerateFlag(FinslerError, ValueError):
    pass


class MissingDensity(FinslerError, ValueError):
    pass


class NoAdmissibleRoot(FinslerError, RuntimeError):
    pass


class QuadratureFailure(FinslerError, RuntimeError):
    pass


class DomainError(FinslerError, ValueError):
    pass


class InvalidParams(FinslerError, ValueError):
    pass


class InsufficientData(FinslerError, ValueError):
    pass


class NonpositiveValue(FinslerError, ValueError):
    pass
