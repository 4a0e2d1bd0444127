"""Exception hierarchy shared by every module of the package."""


class ConvLimitError(Exception):
    """Base class for all errors raised by convlimit."""


class AllZero(ConvLimitError, ValueError):
    pass


class DuplicateOffset(ConvLimitError, ValueError):
    pass


class Overflow(ConvLimitError):
    pass


class ZeroArgument(ConvLimitError, ValueError):
    pass


class SupercriticalSymbol(ConvLimitError):
    """max |F| on the unit circle exceeds 1 + tol."""


class AmbiguousCluster(ConvLimitError):
    pass


class DissipationNotDetected(ConvLimitError):
    pass


class NonDissipative(ConvLimitError):
    pass


class QuadratureNonConvergence(ConvLimitError):
    pass


class IndexOutOfRange(ConvLimitError, IndexError):
    pass


class ZeroFirstMoment(ConvLimitError):
    """M_1 vanishes at the tangency point; shift the sequence first."""


class InsufficientJetOrder(ConvLimitError):
    pass


class WindowViolation(ConvLimitError):
    pass


class ZeroDrift(ConvLimitError):
    def __init__(self, message, suggested_shift=None):
        super().__init__(message)
        self.suggested_shift = suggested_shift


class OnSpectrum(ConvLimitError):
    pass


class IllConditioned(ConvLimitError):
    pass


class MissingPolynomials(ConvLimitError, KeyError):
    pass


class NotProbabilistic(ConvLimitError, ValueError):
    pass
