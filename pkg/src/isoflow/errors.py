"""Exception types raised by isoflow."""


class IsoflowError(Exception):
    """Base class for all library errors."""


class NonFinite(IsoflowError, ValueError):
    pass


class DegenerateCurve(IsoflowError, ValueError):
    pass


class RotationNumberMismatch(IsoflowError):
    def __init__(self, rotation_number, message=None):
        self.rotation_number = rotation_number
        super().__init__(
            message or f"rotation number {rotation_number:.6f} differs from 1"
        )


class DerivativeCapExceeded(IsoflowError, ValueError):
    pass


class DegenerateRatio(IsoflowError, ArithmeticError):
    pass


class NonPositiveArea(IsoflowError, ValueError):
    pass


class StepRejected(IsoflowError):
    pass


class StiffnessFailure(IsoflowError):
    """Raised when a flow step cannot be completed even after repeated halving.

    The partially accumulated trace is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NotStarShaped(IsoflowError):
    def __init__(self, lower_bound):
        self.lower_bound = lower_bound
        super().__init__(
            f"curve is not star-shaped about the fitted centre; "
            f"Hausdorff distance >= {lower_bound:.3e}"
        )


class InsufficientData(IsoflowError, ValueError):
    pass


class SpecInvalid(IsoflowError, ValueError):
    pass


class UnderResolved(UserWarning):
    """Fourier tail has not decayed below the resolution threshold."""
