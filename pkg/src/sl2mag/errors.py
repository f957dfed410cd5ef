"""Exception types raised by the library."""


class Sl2MagError(Exception):
    """Base class for all library errors."""


class NonUnitDeterminant(Sl2MagError, ValueError):
    pass


class NonpositiveY(Sl2MagError, ValueError):
    pass


class IndexOutOfRange(Sl2MagError, IndexError):
    pass


class NotUnitSpeed(Sl2MagError, ValueError):
    pass


class InvalidRadius(Sl2MagError, ValueError):
    pass


class CaseMismatch(Sl2MagError, ValueError):
    pass


class NonpositiveYReached(Sl2MagError, ValueError):
    pass


class StrengthTooSmall(Sl2MagError, ValueError):
    pass


class DegenerateDenominator(Sl2MagError, ZeroDivisionError):
    pass


class InvalidRatio(Sl2MagError, ValueError):
    pass


class NonRotationalPhase(Sl2MagError, ValueError):
    pass


class ZeroVector(Sl2MagError, ValueError):
    pass


class DegenerateProjection(Sl2MagError, ValueError):
    pass


class StepUnderflow(Sl2MagError, RuntimeError):
    """The numerical integrator could not continue (typically y -> 0)."""


class UnknownFigureId(Sl2MagError, KeyError):
    pass
