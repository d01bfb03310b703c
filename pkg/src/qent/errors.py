"""Exception hierarchy shared by all qent modules."""


class QentError(Exception):
    """Base class for every error raised by qent."""


class NumericalError(QentError):
    """A numerical kernel produced something it never should on valid input."""


class NotHermitian(QentError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class DimensionMismatch(QentError, ValueError):
    pass


class InvalidWeights(QentError, ValueError):
    pass


class NonOrthonormalFrame(QentError, ValueError):
    pass


class InvalidDensityMatrix(QentError, ValueError):
    pass


class OutOfRange(QentError, ValueError):
    pass


class NegativeEigenvalueBeyondTolerance(NumericalError):
    pass


class UnsupportedFamily(QentError, ValueError):
    pass


class InsufficientBins(QentError, ValueError):
    pass


class InvalidConfig(QentError, ValueError):
    pass
