"""Exception hierarchy shared by all modules."""


class MajoranaError(Exception):
    """Base class for every error raised by this package."""


class DegenerateExponent(MajoranaError):
    """The scaling exponent is undefined (Emden-Fowler with a = -2)."""


class NonPositiveScale(MajoranaError):
    pass


class DomainViolation(MajoranaError):
    pass


class IndeterminateRatio(MajoranaError):
    """Every probe point has a vanishing residual."""


class NoInvariantExponent(MajoranaError):
    pass


class OutOfGaugeDomain(MajoranaError):
    pass


class DegenerateGauge(MajoranaError):
    """The gauge derivative vanishes where the reduction needs it."""


class InconsistentDerivatives(MajoranaError):
    pass


class SingularDenominator(MajoranaError):
    pass


class IntegrationError(MajoranaError):
    pass


class StepUnderflow(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


class RootNotFound(IntegrationError):
    pass


class SingularityStop(IntegrationError):
    """Raised when the reduced equation reaches its singular set.

    ``samples`` holds every accepted sample up to and including the last
    valid one, so callers can keep the partial solution.
    """

    def __init__(self, message, samples=None, t_stop=None):
        super().__init__(message)
        self.samples = samples if samples is not None else []
        self.t_stop = t_stop

    @property
    def last_sample(self):
        return self.samples[-1] if self.samples else None


class SingularExpansionPoint(MajoranaError):
    pass


class OverflowDetected(MajoranaError):
    pass


class DomainExit(IntegrationError):
    pass


class NonMonotoneX(MajoranaError):
    pass


class BracketLost(MajoranaError):
    pass


class RangeNotCovered(MajoranaError):
    pass


class ValidationError(MajoranaError):
    """Bad problem descriptor or CLI arguments."""
