"""Exception types raised across the package."""


class TcmpError(ValueError):
    """Base class for input and contract errors."""


class MalformedCharPoly(TcmpError):
    """Characteristic polynomial is not ``z^d`` minus terms of total degree < d."""


class MissingMoment(TcmpError, KeyError):
    """An explicit moment table lacks a required entry."""

    def __str__(self):
        return ValueError.__str__(self)


class DegreeTooHigh(TcmpError):
    """Polynomial degree exceeds the moment matrix level."""


class LevelMismatch(TcmpError):
    pass


class ZeroPolynomial(TcmpError):
    pass


class EmptyPolynomial(TcmpError):
    pass


class DuplicateRoots(TcmpError):
    pass


class NotCharacteristic(TcmpError):
    """Polynomial fails the characteristic-membership test."""


class NotAnalytic(TcmpError):
    """Polynomial contains a power of zbar."""


class EmptyZeroSet(TcmpError):
    pass


class RelationViolated(TcmpError):
    """Column relation does not hold in the moment matrix of the data."""


class InconsistentExtension(TcmpError):
    """Recursively generated sequence disagrees with the given moments."""


class InvariantViolation(RuntimeError):
    """An internal invariant failed; signals a logic or conditioning problem."""
