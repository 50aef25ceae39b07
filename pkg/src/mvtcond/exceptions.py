"""Exception hierarchy shared by every module of the package."""


class MVTError(ValueError):
    """Base class for all errors raised by :mod:`mvtcond`."""


class NotPositiveDefinite(MVTError):
    """A Cholesky pivot was non-positive or non-finite."""


class NotSymmetric(MVTError):
    """Matrix asymmetry exceeds the relative tolerance."""


class DimensionMismatch(MVTError):
    pass


class InvalidPartition(MVTError):
    """Index sets overlap, fall out of range, or do not cover all coordinates."""


class InvalidParameters(MVTError):
    """A parameter document or constructor argument violates an invariant."""


class NonPositiveSupport(MVTError):
    pass


class InvalidDof(MVTError):
    pass


class DofTooSmall(MVTError):
    """A moment is requested that does not exist for the given degrees of freedom."""


class EmptySample(MVTError):
    pass


class QuadratureNonConvergence(MVTError, ArithmeticError):
    """Adaptive subdivision exhausted its panel budget."""
