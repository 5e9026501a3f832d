"""Exception hierarchy shared across the package."""


class AdiaoptError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AdiaoptError, ValueError):
    """Input violates a documented precondition."""


class AmbiguousLogarithmError(ValidationError):
    """Target unitary has an eigenphase at exactly pi."""


class NumericalError(AdiaoptError, ArithmeticError):
    """Non-finite values or a broken invariant during a computation."""


class GapCollapseError(NumericalError):
    """The tracked level came closer to another level than the gap floor."""


class GaugeTrackingError(NumericalError):
    """Consecutive eigenvectors overlap too weakly to transport the phase."""


class DegenerateFrameError(NumericalError):
    """Rotating-frame precession rate vanishes."""
