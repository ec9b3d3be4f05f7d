"""Exception hierarchy for canondae.

Every error raised on bad input derives from :class:`CanonDAEError`, which is
itself a ``ValueError`` so callers that only care about "bad input" can catch
the builtin.
"""

from __future__ import annotations


class CanonDAEError(ValueError):
    """Base class for all canondae input and numerical errors."""


class ShapeMismatchError(CanonDAEError):
    pass


class NonSkewHermitianError(CanonDAEError):
    """J* != -J beyond tolerance."""


class ZeroMatrixError(CanonDAEError):
    """J is (numerically) the zero matrix."""


class NotUnitaryError(CanonDAEError):
    pass


class InvalidSplittingError(CanonDAEError):
    """A user-supplied V does not block-diagonalize J as required."""


class InvalidLayerError(CanonDAEError):
    pass


class UnsupportedFunctionClassError(CanonDAEError):
    pass


class UnsupportedSourceError(UnsupportedFunctionClassError):
    pass


class InvalidModeError(CanonDAEError):
    pass


class RealShiftError(CanonDAEError):
    """A real shift was given where a non-real one is required."""


class SingularBlockError(CanonDAEError):
    """A block that must be inverted is numerically singular.

    Attributes
    ----------
    layer : int or None
        Index of the offending layer, when known.
    sigma_min : float
        Smallest singular value of the block (the witness).
    shift : complex or None
        Spectral parameter / shift at which the failure happened.
    """

    def __init__(self, message, *, layer=None, sigma_min=float("nan"), shift=None):
        super().__init__(message)
        self.layer = layer
        self.sigma_min = sigma_min
        self.shift = shift


class SingularA22Error(SingularBlockError):
    """The normal-normal block of the shifted pencil is singular on a layer."""


class GridMisalignedError(CanonDAEError):
    pass


class NonFiniteGeneratorError(CanonDAEError):
    pass


class InitialNotInRangeError(CanonDAEError):
    """The initial value for (Jf)(t0) is not in ran J."""


class StepUnderflowError(CanonDAEError):
    pass


class EigensolverError(CanonDAEError):
    pass


class RangeInvalidError(CanonDAEError):
    pass


class InvalidTensorError(CanonDAEError):
    pass


class DegenerateWeightError(CanonDAEError):
    """The weight W is not positive definite on some layer."""
