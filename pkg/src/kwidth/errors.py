"""Exception hierarchy shared by every stage of the width pipeline."""


class KWidthError(Exception):
    """Base class for all errors raised by kwidth."""


class InvalidCurve(KWidthError, ValueError):
    pass


class DegenerateProjection(KWidthError):
    pass


class PerturbationFailed(KWidthError):
    pass


class DegenerateHeights(KWidthError):
    pass


class NonTransverseCrossing(KWidthError):
    pass


class DegenerateInflection(KWidthError):
    pass


class NearTripleTangency(KWidthError):
    pass


class TangentLine(KWidthError):
    pass


class ArrangementInconsistent(KWidthError):
    pass


class WidthMismatch(KWidthError):
    pass


class LowConfidence(KWidthError):
    pass


class FlagViolation(KWidthError):
    pass


class CurvatureSignFailure(KWidthError):
    pass


class ParseError(KWidthError, ValueError):
    pass
