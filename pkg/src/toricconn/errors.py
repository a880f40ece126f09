"""Exception hierarchy.

Every domain error carries a distinct ``exit_code`` so the command line front
end can map a failure class to a process status without a lookup table.
"""


class ToricError(Exception):
    exit_code = 1


class ParseError(ToricError):
    exit_code = 2


class FanError(ToricError):
    exit_code = 3


class NonPrimitiveRay(FanError):
    exit_code = 4


class NonSmoothCone(FanError):
    exit_code = 5


class IncompleteFan(FanError):
    exit_code = 6


class RayNotInCone(FanError):
    exit_code = 7


class DimensionMismatch(ToricError, ValueError):
    exit_code = 8


class NonUnitImage(ToricError, ValueError):
    exit_code = 9


class NotInvertible(ToricError, ValueError):
    exit_code = 10


class Lemma1Failure(ToricError):
    exit_code = 11


class IncompatibleFiltrations(ToricError):
    exit_code = 12


class CocycleFailure(ToricError):
    exit_code = 13


class NotSplit(ToricError):
    exit_code = 14


class NoCoboundary(ToricError):
    exit_code = 15


class GaugeMismatch(ToricError):
    exit_code = 16


class CurvatureNonzero(ToricError):
    exit_code = 17


class FlatFrameFailure(ToricError):
    exit_code = 18


class ChartDisagreement(ToricError):
    exit_code = 19


class ResidueMismatch(ToricError):
    exit_code = 20
